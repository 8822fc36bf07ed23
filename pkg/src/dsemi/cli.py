"""Command-line driver: verification suites, evolution orbits and coefficient tables."""

from __future__ import annotations

import sys

import click

from . import e7system as e7
from .awsystem import aw_moments, aw_spectral, aw_weight_spec
from .config import RunConfig, load_config
from .errors import ConfigInvalid, Degenerate, HardSingularity
from .opsys import compute_moments, ops_from_moments
from .report import dumps, environment_record, exit_status, fmt_real, fmt_value, render
from .suites import Workspace, run_suites

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _load(path, precision) -> RunConfig:
    try:
        return load_config(path, precision)
    except ConfigInvalid as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


@click.group()
def main() -> None:
    """Verification driver for the semi-classical orthogonal polynomial systems."""


@main.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="key = value parameter file")
@click.option("--suite", "suites", multiple=True, help="suite to run (repeatable); overrides the config list")
@click.option("--precision", type=int, default=None, help="working precision in decimal digits")
def verify(config_path, suites, precision) -> None:
    """Run verification suites and write a JSON-lines report."""
    cfg = _load(config_path, precision)
    names = tuple(suites) if suites else None
    try:
        records = run_suites(cfg, names)
    except ConfigInvalid as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    env = environment_record(cfg.precision_digits, cfg.rng_seed, cfg.digest(), "verify")
    _emit(render(env, records), cfg)
    status = exit_status(records)
    for r in records:
        if r.passed is False:
            click.echo(f"FAIL {r.suite}/{r.check_id} [{r.paper_anchor}] residual {fmt_real(r.max_residual)}", err=True)
    sys.exit(status)


def _initial_state(cfg: RunConfig, ws: Workspace) -> e7.E7State:
    p = ws.m3
    if cfg.orbit_n == 0:
        return e7.E7State.seed(p, e7.seed_rho(p, ws.m00_explicit()))
    if cfg.orbit_n >= cfg.n_max:
        raise ConfigInvalid("orbit_n must be below n_max")
    return ws.ref.state(0, cfg.orbit_n)


def _state_row(step: int, s: e7.E7State, rt) -> dict:
    return {
        "step": step,
        "t": fmt_value(s.t),
        "f": fmt_value(s.f),
        "lambda": fmt_value(s.lam),
        "rho": fmt_value(s.rho),
        "round_trip": None if rt is None else fmt_real(rt),
    }


@main.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--steps", type=click.IntRange(min=0), required=True)
@click.option("--direction", type=click.Choice(["fwd", "bwd"]), default="fwd")
@click.option("--precision", type=int, default=None)
def evolve(config_path, steps, direction, precision) -> None:
    """Iterate the t-evolution from the configured initial state (t -> q t per step)."""
    cfg = _load(config_path, precision)
    lines = [dumps(environment_record(cfg.precision_digits, cfg.rng_seed, cfg.digest(), "evolve"))]
    lines.append(dumps({"columns": ["step", "t", "f", "lambda", "rho", "round_trip"], "n": cfg.orbit_n, "direction": direction}))
    status = EXIT_PASS
    if steps:
        ws = Workspace(cfg)
        step = 0
        try:
            ws.validate(cfg.orbit_n > 0)
            s = _initial_state(cfg, ws)
            lines.append(dumps(_state_row(0, s, None)))
            for step in range(1, steps + 1):
                if direction == "fwd":
                    nxt, _ = e7.evolve_forward(s)
                    rt = e7.evolve_backward(nxt).distance(s)
                else:
                    nxt = e7.evolve_backward(s)
                    rt = e7.evolve_forward(nxt)[0].distance(s)
                lines.append(dumps(_state_row(step, nxt, rt)))
                s = nxt
        except ConfigInvalid as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except (HardSingularity, Degenerate) as exc:
            lines.append(dumps({"abort": {"step": step, "error": type(exc).__name__, "message": str(exc)}}))
            click.echo(f"evolution aborted at step {step}: {exc}", err=True)
            status = EXIT_FAIL
    _emit("\n".join(lines) + "\n", cfg)
    sys.exit(status)


def _poly(c) -> list:
    return [fmt_value(v) for v in c]


@main.command()
@click.option("--what", type=click.Choice(["moments", "recurrence", "spectral"]), required=True)
@click.option("--n", "n", type=click.IntRange(min=0), required=True, help="largest index tabulated")
@click.option("--system", type=click.Choice(["aw", "m3"]), default="aw", help="Askey-Wilson or the M = 3 contour weight")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--precision", type=int, default=None)
def table(what, n, system, config_path, precision) -> None:
    """Tabulate moments, recurrence coefficients or spectral coefficients for k = 0..n."""
    cfg = _load(config_path, precision)
    ws = Workspace(cfg)
    try:
        ws.validate(system == "m3" and what != "moments")
    except ConfigInvalid as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    rows = [dumps(environment_record(cfg.precision_digits, cfg.rng_seed, cfg.digest(), f"table-{system}-{what}"))]
    if system == "aw":
        rows += [dumps(r) for r in _aw_table(ws, what, n)]
    else:
        rows += [dumps(r) for r in _m3_table(ws, what, n)]
    _emit("\n".join(rows) + "\n", cfg)


def _aw_table(ws: Workspace, what: str, n: int):
    p = ws.aw
    if what == "moments":
        for k in range(n + 1):
            yield {"k": k, "m0k": fmt_value(aw_moments(p, k))}
        return
    if what == "recurrence":
        w = aw_weight_spec(p)
        st = ops_from_moments(compute_moments(w, p.a[0], p.a[1], n, n + 1, ws.ctx), n, ws.ctx)
        for k in range(n + 1):
            c = aw_spectral(p, k)
            yield {
                "k": k,
                "a2_hankel": fmt_value(st.a2[k]) if k else None,
                "a2_closed": fmt_value(c.a2) if k else None,
                "b_hankel": fmt_value(st.b[k]),
                "b_closed": fmt_value(c.b),
            }
        return
    for k in range(n + 1):
        c = aw_spectral(p, k)
        yield {"k": k, "W": _poly(c.Wn), "Theta": _poly(c.Theta), "Omega_plus_V": _poly(c.Omega_plus_V)}


def _m3_table(ws: Workspace, what: str, n: int):
    p = ws.m3
    if what == "moments":
        # m_00 along the deformation lattice t q^(j/2)
        m = ws.m00_explicit()
        for j in range(n + 1):
            tj = p.t * ws.ctx.qh**j
            yield {"j": j, "t": fmt_value(tj), "m00": fmt_value(m(tj))}
        return
    ref = e7.M3Reference(p, max(n + 1, 2))
    if what == "recurrence":
        st = ref.ops(0).state
        for k in range(n + 1):
            yield {"k": k, "a2": fmt_value(st.a2[k]) if k else None, "b": fmt_value(st.b[k])}
        return
    sys_ = ref.spectral(0)
    for k in range(n + 1):
        c = sys_.coeffs(k)
        yield {"k": k, "W": _poly(c.Wn), "Theta": _poly(c.Theta), "Omega": _poly(c.Omega)}


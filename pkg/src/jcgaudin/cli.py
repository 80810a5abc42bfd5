"""Command line entry point.

Every command is a thin client of the service handlers: flags and files
are parsed into the same request models the HTTP app accepts, and results
are rendered with the deterministic serializer.  Exit codes follow the
error taxonomy: 1 for invalid input, 2 for usage mistakes, 3 for numeric
failures.
"""

from __future__ import annotations

import json
import sys

import click
import pydantic

from . import reporting
from .errors import IoError, JcgError, UsageError, ValidationError
from .service import handlers as H
from .service import schemas as S


def _fail(exc: JcgError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(exc.exit_code)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _load_model(path: str) -> S.ModelConfig:
    return _validate(S.ModelConfig, _load_json(path), path)


def _validate(schema, payload, source: str):
    try:
        return schema.model_validate(payload)
    except pydantic.ValidationError as exc:
        raise ValidationError(f"{source} does not match the expected "
                              f"schema: {exc}") from exc


def _parse_complex(text: str) -> complex:
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _emit(text: str, out: str | None) -> None:
    reporting.write_text(None if out in (None, "-") else out, text)


@click.group()
def main() -> None:
    """Numerical toolkit for the classical Jaynes-Cummings-Gaudin chain."""
    reporting.configure_logging()


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--signs", default=None,
              help="Override sign pattern, e.g. 1,-1,1.")
@click.option("--out", default=None, help="Output path (default stdout).")
def bethe(config: str, signs: str | None, out: str | None) -> None:
    """Classify a critical point: roots, pairing, Williamson type."""
    try:
        mc = _load_model(config)
        if signs is not None:
            mc = mc.model_copy(
                update={"signs": [int(v) for v in _parse_floats(signs)]})
        resp = H.handle_bethe(S.BetheRequest(model=mc))
        _emit(reporting.dump_json(resp), out)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--state", "state_path", required=True,
              help="Phase state JSON.")
@click.option("--out", default=None, help="Output path (default stdout).")
def normal(config: str, state_path: str, out: str | None) -> None:
    """Normal coordinates and quadratic (K, L) of a state."""
    try:
        mc = _load_model(config)
        sd = _validate(S.StateDoc, _load_json(state_path), state_path)
        resp = H.handle_normal(S.NormalRequest(model=mc, state=sd))
        _emit(reporting.dump_json(resp), out)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--state", "state_path", required=True,
              help="Phase state JSON.")
@click.option("--duration", type=float, required=True)
@click.option("--samples", type=int, default=64, show_default=True)
@click.option("--coeffs", default=None,
              help="Flow coefficients c_1..c_{n+1} (default physical).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--out", default=None, help="Output path (default stdout).")
def evolve(config: str, state_path: str, duration: float, samples: int,
           coeffs: str | None, fmt: str, out: str | None) -> None:
    """Integrate a commuting flow and emit the trajectory."""
    try:
        mc = _load_model(config)
        sd = _validate(S.StateDoc, _load_json(state_path), state_path)
        req = S.EvolveRequest(
            model=mc, state=sd, duration=duration, samples=samples,
            coeffs=None if coeffs is None else _parse_floats(coeffs))
        resp = H.handle_evolve(req)
        if fmt == "json":
            _emit(reporting.dump_json(resp), out)
            return
        from . import model as model_mod
        params = model_mod.make_params(mc.n, mc.s, mc.omega, mc.epsilon)
        states = [model_mod.make_state(
            params, st.b.value(), st.spins, casimir_tol=1e-6)
            for st in resp.states]
        _emit(reporting.trajectory_csv(params, resp.times, states,
                                       resp.hamiltonians), out)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--soliton", "soliton_path", required=True,
              help="Soliton config JSON {\"x0\": [{re, im}, ...]}.")
@click.option("--times", required=True,
              help="Flow times t_1,..,t_{n+1}.")
@click.option("--out", default=None,
              help="State JSON output path (default stdout).")
def soliton(config: str, soliton_path: str, times: str,
            out: str | None) -> None:
    """Reconstruct the phase state of a soliton at given flow times."""
    try:
        mc = _load_model(config)
        doc = _validate(S.SolitonDoc, _load_json(soliton_path), soliton_path)
        resp = H.handle_soliton(S.SolitonRequest(
            model=mc, soliton=doc, times=_parse_floats(times)))
        _emit(reporting.dump_json(resp.state), out)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--soliton", "soliton_path", required=True,
              help="Soliton config JSON.")
@click.option("--duration", type=float, default=6.283185307179586,
              show_default=True,
              help="Loop parameter range; u spans [-duration/2, duration/2].")
@click.option("--samples", type=int, default=400, show_default=True)
@click.option("--c1", default="1e-8",
              help="Fiber value fixing the periodic flow coefficients.")
@click.option("--out", default=None, help="CSV output path (default stdout).")
def divisor(config: str, soliton_path: str, duration: float, samples: int,
            c1: str, out: str | None) -> None:
    """Divisor motion of a soliton under the periodic flow (CSV)."""
    try:
        mc = _load_model(config)
        doc = _validate(S.SolitonDoc, _load_json(soliton_path), soliton_path)
        resp = H.handle_divisor(S.DivisorRequest(
            model=mc, soliton=doc, duration=duration, samples=samples,
            c1=S.Complex.of(_parse_complex(c1))))
        _emit(_divisor_csv(resp), out)
    except JcgError as exc:
        _fail(exc)


def _divisor_csv(resp: S.DivisorResponse) -> str:
    times = [row.t for row in resp.rows]
    gaps = [row.gap for row in resp.rows]
    width = max((len(row.lambdas) for row in resp.rows), default=0)
    pts = [[z.value() for z in row.lambdas] if not row.gap else [0j] * width
           for row in resp.rows]
    return reporting.divisor_csv(times, pts, gaps)


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--state", "state_path", required=True,
              help="Phase state JSON.")
@click.option("--cycle", required=True,
              help="A:<pair index> or B:<waypoints JSON path>.")
@click.option("--samples", type=int, default=2048, show_default=True)
@click.option("--out", default=None, help="Output path (default stdout).")
def actions(config: str, state_path: str, cycle: str, samples: int,
            out: str | None) -> None:
    """Action integral over an A- or B-cycle of the spectral curve."""
    try:
        mc = _load_model(config)
        sd = _validate(S.StateDoc, _load_json(state_path), state_path)
        kind, _, rest = cycle.partition(":")
        kind = kind.strip().upper()
        if kind == "A":
            try:
                pair = int(rest)
            except ValueError as exc:
                raise UsageError(
                    f"A-cycle needs a pair index, got {rest!r}") from exc
            req = S.ActionsRequest(model=mc, state=sd, cycle="A",
                                   pair=pair, samples=samples)
        elif kind == "B":
            if not rest:
                raise UsageError("B-cycle needs a waypoints JSON path")
            wdoc = _validate(S.WaypointsDoc, _load_json(rest), rest)
            req = S.ActionsRequest(model=mc, state=sd, cycle="B",
                                   waypoints=wdoc.waypoints,
                                   samples=samples)
        else:
            raise UsageError(f"unknown cycle {cycle!r}; use A:<k> or "
                             "B:<waypoints.json>")
        resp = H.handle_actions(req)
        _emit(reporting.dump_json(resp), out)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--focus", type=int, default=1, show_default=True,
              help="Focus-focus block (1-based).")
@click.option("--out", default=None, help="Output path (default stdout).")
def invariants(config: str, focus: int, out: str | None) -> None:
    """Symplectic invariants of one focus-focus block."""
    try:
        mc = _load_model(config)
        resp = H.handle_invariants(S.InvariantsRequest(model=mc,
                                                       focus=focus))
        _emit(reporting.dump_json(resp), out)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--focus", type=int, default=1, show_default=True)
@click.option("--loop", type=int, default=1, show_default=True,
              help="Which c_k plane the loop encircles (1-based).")
@click.option("--radius", type=float, default=None,
              help="Loop radius (default rho of the focus block).")
@click.option("--samples", type=int, default=4096, show_default=True)
@click.option("--out", default=None, help="Output path (default stdout).")
def monodromy(config: str, focus: int, loop: int, radius: float | None,
              samples: int, out: str | None) -> None:
    """Loop integral of the one-form around a circle in the base."""
    try:
        mc = _load_model(config)
        resp = H.handle_monodromy(S.MonodromyRequest(
            model=mc, focus=focus, loop=loop, radius=radius,
            samples=samples))
        _emit(reporting.dump_json(resp), out)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.option("--config", required=True, help="Model config JSON.")
@click.option("--delta", type=float, required=True,
              help="Normal-coordinate amplitude of the excursion start.")
@click.option("--c1", required=True,
              help="Fiber value, e.g. 1e-5+0i (|c1| <= delta^2).")
@click.option("--spectators", default=None,
              help="Spectator fiber values c_2,..,c_m (default 1e-10).")
@click.option("--out", default=None, help="Output path (default stdout).")
def inout(config: str, delta: float, c1: str, spectators: str | None,
          out: str | None) -> None:
    """Numerical in-out experiment measuring the multipliers."""
    try:
        mc = _load_model(config)
        spect = None
        if spectators is not None:
            spect = [S.Complex.of(_parse_complex(p))
                     for p in spectators.split(",") if p.strip()]
        resp = H.handle_inout(S.InOutRequest(
            model=mc, delta=delta, c1=S.Complex.of(_parse_complex(c1)),
            spectators=spect))
        _emit(reporting.dump_json(resp), out)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.argument("target", type=click.Choice(["one-spin", "fig3"]))
@click.option("--samples", type=int, default=400, show_default=True,
              help="Sample count for the fig3 divisor loop.")
@click.option("--out", default=None,
              help="Output path (fig3 default: fig3_divisor.csv).")
def reproduce(target: str, samples: int, out: str | None) -> None:
    """Re-run a published check end to end."""
    try:
        if target == "one-spin":
            resp = H.handle_reproduce_one_spin()
            for chk in resp.checks:
                word = "PASS" if chk.passed else "FAIL"
                click.echo(f"{word} {chk.name}: measured="
                           f"{reporting.fmt_float(chk.measured)} expected="
                           f"{reporting.fmt_float(chk.expected)}")
            if out is not None:
                reporting.write_text(out, reporting.dump_json(resp))
            if not resp.passed:
                sys.exit(1)
            return
        resp = H.handle_reproduce_fig3(samples=samples)
        path = out if out is not None else "fig3_divisor.csv"
        _emit(_divisor_csv(resp), path)
        if path != "-":
            click.echo(f"wrote {path}", err=True)
    except JcgError as exc:
        _fail(exc)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()

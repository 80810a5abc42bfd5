"""Deterministic result serialization shared by the CLI commands.

JSON is rendered by hand so that floats always carry 17 significant digits
and field order follows the schema declaration; the stdlib encoder would
use shortest-round-trip floats, which breaks byte-for-byte golden tests
across platforms.  Files are written to a temporary sibling and renamed so
a failing run never leaves a partial artifact.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import tempfile

import numpy as np

from .errors import IoError

_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
           "info": logging.INFO, "debug": logging.DEBUG}


def configure_logging() -> None:
    """Route diagnostics to standard error at the JCG_LOG level."""
    level = _LEVELS.get(os.environ.get("JCG_LOG", "warn").lower(),
                        logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: "
                                           "%(message)s"))
    root = logging.getLogger("jcgaudin")
    root.handlers[:] = [handler]
    root.setLevel(level)


def fmt_float(x: float) -> str:
    return "%.17g" % float(x)


def to_jsonable(obj):
    """Reduce results to dict/list/scalar form; complex becomes {re, im}."""
    if hasattr(obj, "model_dump"):
        return to_jsonable(obj.model_dump())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(np.real(obj)), "im": float(np.imag(obj))}
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _render(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{json.dumps(str(k))}: {_render(v, indent + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [f"{inner}{_render(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def dump_json(obj) -> str:
    return _render(to_jsonable(obj), 0) + "\n"


def write_text(path: str | None, text: str) -> None:
    """Write atomically to `path`, or to standard output when path is None."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".jcg-tmp-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def trajectory_csv(params, times, states, hamiltonians) -> str:
    """Time series of a trajectory: t, oscillator, spins, then H_1..H_{n+1}."""
    cols = ["t", "re_b", "im_b"]
    for j in range(params.n):
        cols += [f"s{j + 1}_x", f"s{j + 1}_y", f"s{j + 1}_z"]
    cols += [f"H_{k + 1}" for k in range(params.n + 1)]
    lines = [",".join(cols)]
    for t, st, h in zip(times, states, hamiltonians):
        row = [fmt_float(t), fmt_float(st.b.real), fmt_float(st.b.imag)]
        for j in range(params.n):
            row += [fmt_float(v) for v in st.spins[j]]
        row += [fmt_float(v) for v in h]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def divisor_csv(times, points, gaps) -> str:
    """Divisor motion: t then Re/Im of each tracked point; gap rows empty.

    A row whose reconstruction failed keeps its time stamp but leaves every
    coordinate field blank, so column counts stay fixed and plotting tools
    see an explicit break instead of a jump.
    """
    pts = np.asarray(points)
    k = pts.shape[1] if pts.ndim == 2 else 0
    cols = ["t"]
    for i in range(k):
        cols += [f"re_lambda_{i + 1}", f"im_lambda_{i + 1}"]
    lines = [",".join(cols)]
    for idx, t in enumerate(times):
        if gaps[idx]:
            lines.append(",".join([fmt_float(t)] + [""] * (2 * k)))
            continue
        row = [fmt_float(t)]
        for v in pts[idx]:
            row += [fmt_float(np.real(v)), fmt_float(np.imag(v))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"

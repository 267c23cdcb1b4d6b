"""JSON channel files.

Schema::

    {"rep": "a" | "b" | "choi" | "kraus", "dim_in": n, "dim_out": m,
     "trace_preserving": bool | null, "data": ...}

Matrices are nested lists of ``[re, im]`` pairs.  Kraus data is a list of
``{"eta": 1 | -1, "matrix": ...}``.  Floats are written with Python's
shortest round-trip repr, so a save/load cycle is bit-exact.

Family shorthand is accepted in place of explicit data::

    {"family": "adm", "params": [[a, b, g], ...]}
    {"family": "translation", "offset": [x, y, z]}
    {"family": "robust", "kappa": k}
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .channel_rep import Channel
from .errors import CPForgeError, ParseError
from .maps import adm, identity_channel, robust_map, translation

REPS = ("a", "b", "choi", "kraus")


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries must be [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError(f"matrix must be a 2-D array of [re, im] pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParseError("matrix contains non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_dict(channel: Channel, rep: str | None = None) -> dict:
    """Serialize ``channel`` in representation ``rep`` (default: the one it was built from)."""
    rep = rep or channel.rep
    if rep not in REPS:
        raise ValueError(f"unknown representation {rep!r}")
    if rep == "a":
        data = matrix_to_json(channel.amatrix)
    elif rep == "b":
        data = matrix_to_json(channel.bmatrix)
    elif rep == "choi":
        data = matrix_to_json(channel.choi)
    else:
        data = [{"eta": int(eta), "matrix": matrix_to_json(op)} for eta, op in channel.kraus]
    return {
        "rep": rep,
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "trace_preserving": bool(channel.trace_preserving),
        "data": data,
    }


def _family(d: dict) -> Channel:
    fam = d["family"]
    if fam == "adm":
        return adm(d["params"], allow_unphysical=bool(d.get("allow_unphysical", False)))
    if fam == "translation":
        return translation(d["offset"])
    if fam == "robust":
        return robust_map(d["kappa"])
    if fam == "identity":
        return identity_channel(int(d.get("dim", 2)))
    raise ParseError(f"unknown map family {fam!r}")


def channel_from_dict(d) -> Channel:
    """Inverse of :func:`channel_to_dict`; also accepts family shorthand."""
    if not isinstance(d, dict):
        raise ParseError("channel document must be a JSON object")
    try:
        if "family" in d:
            return _family(d)
        rep = d["rep"]
        if rep not in REPS:
            raise ParseError(f"unknown representation {rep!r}")
        n = int(d["dim_in"])
        m = int(d.get("dim_out", n))
        tp = d.get("trace_preserving")
        data = d["data"]
        if rep == "kraus":
            if not isinstance(data, list) or not data:
                raise ParseError("kraus data must be a non-empty list")
            ops = [(int(item["eta"]), matrix_from_json(item["matrix"])) for item in data]
            ch = Channel.from_kraus(ops, trace_preserving=tp)
            if (ch.dim_in, ch.dim_out) != (n, m):
                raise ParseError("Kraus operator shape disagrees with dim_in/dim_out")
            return ch
        mat = matrix_from_json(data)
        if rep == "a":
            return Channel(mat, n, m, trace_preserving=tp)
        if rep == "b":
            return Channel.from_bmatrix(mat, n, m, trace_preserving=tp)
        return Channel.from_choi(mat, n, m, trace_preserving=tp)
    except ParseError:
        raise
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None
    except (CPForgeError, TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from None


def dumps(channel: Channel, rep: str | None = None, indent: int | None = None) -> str:
    return json.dumps(channel_to_dict(channel, rep), indent=indent)


def loads(text: str) -> Channel:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    return channel_from_dict(doc)


def _reject_constant(name: str):
    raise ParseError(f"non-finite constant {name} not allowed")


def save_channel(channel: Channel, path, rep: str | None = None) -> None:
    Path(path).write_text(dumps(channel, rep, indent=1) + "\n")


def load_channel(path) -> Channel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return loads(text)


def format_number(x: float, digits: int = 15) -> str:
    """Fixed 15-significant-digit rendering used in reports."""
    if isinstance(x, complex):
        return f"{format_number(x.real, digits)}{'+' if x.imag >= 0 else '-'}{format_number(abs(x.imag), digits)}j"
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return f"{x:.{digits}g}"

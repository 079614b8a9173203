"""JSON schemas for channels, frames and matrices.

Channel file::

    {"dim_in": n, "dim_out": m, "kraus": [K_1, K_2, ...]}

where each ``K`` is a list of ``m`` rows of ``n`` entries.  An entry is
``[re, im]`` or a bare real.  Parts given as strings (``"1/3"``) or integers
are exact; any JSON float makes the whole file float.

Frame file (pseudo-diagonal channel)::

    {"vectors": [psi_1, ..., psi_m], "gram": C}

with ``psi_i`` length-``d`` lists of entries and ``C`` an ``m x m`` matrix.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..channels import ChannelError, GramFrame, KrausChannel
from ..linalg import CMatrix
from ..scalars import EXACT, FLOAT, QQi


def _is_float_part(p) -> bool:
    return isinstance(p, float)


def _parts(entry):
    if isinstance(entry, list):
        if len(entry) != 2:
            raise ChannelError(f"entry {entry!r} must be [re, im]")
        return entry
    return [entry, 0]


def _detect_backend(matrices) -> str:
    for m in matrices:
        for row in m:
            for e in row:
                if any(_is_float_part(p) for p in _parts(e)):
                    return FLOAT
    return EXACT


def _scalar(entry, backend: str):
    re_, im = _parts(entry)
    if backend == EXACT:
        try:
            return QQi(Fraction(str(re_)), Fraction(str(im)))
        except (ValueError, ZeroDivisionError):
            raise ChannelError(f"bad exact entry {entry!r}") from None
    return complex(float(Fraction(re_)) if isinstance(re_, str) else float(re_),
                   float(Fraction(im)) if isinstance(im, str) else float(im))


def matrix_from_json(rows, backend: str) -> CMatrix:
    return CMatrix([[_scalar(e, backend) for e in row] for row in rows], backend)


def matrix_to_json(m: CMatrix) -> list:
    if m.backend == EXACT:
        return [[[str(v.real), str(v.imag)] for v in row] for row in m.rows]
    return [[[v.real, v.imag] for v in row] for row in m.rows]


def channel_from_json(data: dict, backend: str | None = None) -> KrausChannel:
    try:
        kraus = data["kraus"]
    except KeyError:
        raise ChannelError("channel JSON needs a 'kraus' list") from None
    detected = _detect_backend(kraus)
    if backend == EXACT and detected == FLOAT:
        raise ChannelError("exact backend requested but the file has float entries")
    backend = backend or detected
    ops = tuple(matrix_from_json(k, backend) for k in kraus)
    ch = KrausChannel(ops)
    if "dim_in" in data and data["dim_in"] != ch.dim_in:
        raise ChannelError(f"dim_in is {data['dim_in']} but Kraus operators have {ch.dim_in} columns")
    if "dim_out" in data and data["dim_out"] != ch.dim_out:
        raise ChannelError(f"dim_out is {data['dim_out']} but Kraus operators have {ch.dim_out} rows")
    return ch


def channel_to_json(ch: KrausChannel) -> dict:
    return {"dim_in": ch.dim_in, "dim_out": ch.dim_out, "kraus": [matrix_to_json(k) for k in ch.kraus]}


def frame_from_json(data: dict) -> GramFrame:
    try:
        vecs, gram = data["vectors"], data["gram"]
    except KeyError:
        raise ChannelError("frame JSON needs 'vectors' and 'gram'") from None
    v = np.array([[_scalar(e, FLOAT) for e in row] for row in vecs], dtype=complex)
    c = np.array([[_scalar(e, FLOAT) for e in row] for row in gram], dtype=complex)
    return GramFrame(v, c)


def is_frame(data: dict) -> bool:
    return "gram" in data


def load_json(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

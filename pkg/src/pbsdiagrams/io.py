"""JSON records for matrices, channels, Choi matrices and verdicts.

Complex numbers are ``[re, im]`` pairs; matrices are row-major nested lists.
Floats are written with 17 significant digits so values round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .channels import PurifiedChannel
from .dsl import parse, pretty
from .qsem import BASIS_ORDER


class RecordError(ValueError):
    pass


def matrix_to_literal(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in m]
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_literal(data: Any) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise RecordError("malformed matrix literal") from exc
    if arr.ndim not in (2, 3) or arr.shape[-1] != 2:
        raise RecordError("matrix literal must be nested [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if not np.all(np.isfinite(out)):
        raise RecordError("matrix literal has non-finite entries")
    return out


def _encode(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            raise RecordError("non-finite float in record")
        text = format(float(x), ".17g")
        return text if any(c in text for c in ".e") else text + ".0"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in x) + "]"
    raise TypeError(f"cannot encode {type(x).__name__}")


def dump_record(record) -> str:
    """JSON text with floats at 17 significant digits."""
    return _encode(record) + "\n"


def load_record(text: str) -> dict:
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"invalid JSON: {exc}") from exc
    if not isinstance(rec, dict):
        raise RecordError("record must be a JSON object")
    return rec


# ---------------------------------------------------------------------------
# Channels


def channel_to_record(ch: PurifiedChannel) -> dict:
    return {
        "dim_h": ch.dim_h,
        "dim_e": ch.dim_e,
        "unitary": matrix_to_literal(ch.unitary),
        "env_state": matrix_to_literal(ch.env_state),
    }


def channel_from_record(rec: dict) -> PurifiedChannel:
    try:
        dim_h, dim_e = int(rec["dim_h"]), int(rec["dim_e"])
        u = matrix_from_literal(rec["unitary"])
        eps = matrix_from_literal(rec["env_state"])
    except KeyError as exc:
        raise RecordError(f"channel record lacks field {exc.args[0]!r}") from exc
    try:
        return PurifiedChannel(dim_h, dim_e, u, eps).validate()
    except ValueError as exc:
        raise RecordError(str(exc)) from exc


def read_channel(path) -> PurifiedChannel:
    return channel_from_record(load_record(Path(path).read_text()))


def write_channel(path, ch: PurifiedChannel) -> None:
    Path(path).write_text(dump_record(channel_to_record(ch)))


def read_channel_dir(path) -> dict[str, PurifiedChannel]:
    """Gate assignment from a directory of ``<label>.chan`` files."""
    d = Path(path)
    if not d.is_dir():
        raise RecordError(f"{path} is not a directory")
    return {p.stem: read_channel(p) for p in sorted(d.glob("*.chan"))}


def read_matrix(path) -> np.ndarray:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"invalid JSON: {exc}") from exc
    return matrix_from_literal(data)


def write_matrix(path, m: np.ndarray) -> None:
    Path(path).write_text(dump_record(matrix_to_literal(m)))


# ---------------------------------------------------------------------------
# Choi and verdict records


def choi_record(choi, n: int, dim_h: int) -> dict:
    return {
        "pol_dim": 2,
        "n": n,
        "dim_h": dim_h,
        "basis_order": BASIS_ORDER,
        "choi": matrix_to_literal(choi.matrix),
    }


def witness_record(w) -> dict:
    return {
        "criterion": w.criterion,
        "context": pretty(w.context),
        "assignment": {k: channel_to_record(v) for k, v in sorted(w.assignment.items())},
        "input_operator": matrix_to_literal(w.input_operator),
        "separation": float(w.separation),
    }


def witness_from_record(rec: dict):
    from .equiv import DistinguishingWitness

    return DistinguishingWitness(
        parse(rec["context"]),
        {k: channel_from_record(v) for k, v in rec["assignment"].items()},
        matrix_from_literal(rec["input_operator"]),
        float(rec["separation"]),
        rec.get("criterion", ""),
    )


def verdict_record(v) -> dict:
    rec = {
        "level": v.level,
        "equivalent": v.equivalent,
        "failed_criteria": list(v.failed_criteria),
    }
    if v.witness is not None:
        rec["witness"] = witness_record(v.witness)
    return rec

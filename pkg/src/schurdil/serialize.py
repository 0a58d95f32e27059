"""JSON interchange for every artifact the CLI reads or writes.

Matrices travel as split real/imaginary row-major lists so the files stay
language-neutral; every loader re-validates shape, finiteness, and (for
algebras, strictly by default) trace normalization.  ``dumps`` is the one
canonical encoder: sorted keys, fixed separators, newline-terminated, no
timestamps, so equal inputs give byte-equal artifacts.
"""

from __future__ import annotations

import json

import numpy as np

from .algebra import AlgebraElement, TracialAlgebra
from .multiplier import SchurMultiplier
from .representation import TraceRepresentation


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def mat_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("only 2-D matrices serialize")
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(x) for x in a.real.reshape(-1)],
        "im": [float(x) for x in a.imag.reshape(-1)],
    }


def mat_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows < 0 or cols < 0 or re.size != rows * cols or im.size != rows * cols:
        raise ValueError(
            f"matrix data has {re.size}/{im.size} entries, expected {rows}*{cols}"
        )
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise ValueError("matrix entries must be finite")
    return (re + 1j * im).reshape(rows, cols)


def algebra_to_json(alg: TracialAlgebra) -> dict:
    return {"blocks": list(alg.blocks), "weights": [float(w) for w in alg.weights]}


def algebra_from_json(obj: dict, strict: bool = True) -> TracialAlgebra:
    try:
        blocks = obj["blocks"]
        weights = obj["weights"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed algebra object: {exc}") from exc
    return TracialAlgebra(tuple(blocks), tuple(weights), check=strict)


def element_to_json(el: AlgebraElement) -> dict:
    return {
        "algebra": algebra_to_json(el.algebra),
        "blocks": [mat_to_json(b) for b in el.blocks],
    }


def element_from_json(obj: dict, strict: bool = True) -> AlgebraElement:
    alg = algebra_from_json(obj["algebra"], strict=strict)
    return AlgebraElement(alg, [mat_from_json(b) for b in obj["blocks"]])


def rep_to_json(rep: TraceRepresentation) -> dict:
    return {
        "schema": "schurdil.representation/1",
        "algebra": algebra_to_json(rep.algebra),
        "d": [element_to_json(el) for el in rep.d],
    }


def rep_from_json(obj: dict, strict: bool = True) -> TraceRepresentation:
    try:
        alg = algebra_from_json(obj["algebra"], strict=strict)
        elements = [element_from_json(e, strict=strict) for e in obj["d"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed representation object: {exc}") from exc
    for el in elements:
        if el.algebra.blocks != alg.blocks or el.algebra.weights != alg.weights:
            raise ValueError("element algebra differs from the representation algebra")
    return TraceRepresentation(alg, tuple(elements))


def multiplier_to_json(phi: SchurMultiplier) -> dict:
    return {"schema": "schurdil.multiplier/1", "n": phi.n, "m": mat_to_json(phi.m)}


def multiplier_from_json(obj: dict) -> SchurMultiplier:
    try:
        n = int(obj["n"])
        m = mat_from_json(obj["m"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed multiplier object: {exc}") from exc
    if m.shape != (n, n):
        raise ValueError(f"multiplier table shape {m.shape} does not match n={n}")
    return SchurMultiplier(m)


def dilation_to_json(rep: TraceRepresentation, window: int, diagnostics: dict) -> dict:
    return {
        "schema": "schurdil.dilation/1",
        "window": int(window),
        "rep": rep_to_json(rep),
        "diagnostics": {k: v for k, v in sorted(diagnostics.items())},
    }


def dilation_from_json(obj: dict, strict: bool = True) -> tuple[TraceRepresentation, int]:
    try:
        return rep_from_json(obj["rep"], strict=strict), int(obj["window"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed dilation object: {exc}") from exc

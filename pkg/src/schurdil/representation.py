"""Trace-form symbols: families of unitaries d_1..d_n in a tracial algebra.

A representation turns into a Schur multiplier through

    m[i, j] = tau(d_i^dagger d_j),

which is automatically Hermitian, PSD, unital on the diagonal, and has all
entries in the closed unit disk.  The gauge d -> (d_1^dagger d_1, ...,
d_1^dagger d_n) leaves the table untouched and pins d_1 at the unit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, TracialAlgebra, trace
from .linalg import DEFAULT_TOL, frobenius
from .multiplier import SchurMultiplier


@dataclass(frozen=True)
class TraceRepresentation:
    algebra: TracialAlgebra
    d: tuple[AlgebraElement, ...]

    def __post_init__(self):
        ds = tuple(self.d)
        if len(ds) == 0:
            raise ValueError("representation needs at least one element")
        for el in ds:
            if el.algebra.blocks != self.algebra.blocks or el.algebra.weights != self.algebra.weights:
                raise ValueError("all elements must live in the representation's algebra")
        object.__setattr__(self, "d", ds)

    @property
    def n(self) -> int:
        return len(self.d)


def build_multiplier(rep: TraceRepresentation) -> SchurMultiplier:
    """Symbol table m[i, j] = tau(d_i^dagger d_j).

    Only the upper triangle is computed; the lower triangle is its exact
    conjugate and the diagonal is exactly real, so Hermitian symmetry holds
    bitwise, not just up to tolerance.
    """
    n = rep.n
    m = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(i, n):
            val = trace(rep.d[i].dagger() @ rep.d[j])
            m[i, j] = val
            if j == i:
                m[i, i] = val.real
            else:
                m[j, i] = np.conj(val)
    return SchurMultiplier(m)


def gauge_normalize(rep: TraceRepresentation) -> TraceRepresentation:
    """Replace d_k by d_1^dagger d_k; the symbol table is unchanged and
    the first element becomes the unit."""
    g = rep.d[0].dagger()
    return TraceRepresentation(rep.algebra, tuple(g @ dk for dk in rep.d))


@dataclass(frozen=True)
class RepValidation:
    ok: bool
    unitarity_residuals: tuple[float, ...]
    normalization_residual: float
    messages: tuple[str, ...]


def validate(rep: TraceRepresentation, tol: float = DEFAULT_TOL) -> RepValidation:
    """Check blockwise unitarity of every d_i and the trace normalization.

    Reports residuals instead of raising so callers can inspect a broken
    artifact; ok means every check passed at ``tol`` (normalization at its
    own 1e-12 budget).
    """
    msgs = []
    unit_resids = []
    for idx, el in enumerate(rep.d):
        resid = 0.0
        for blk in el.blocks:
            eye = np.eye(blk.shape[0])
            resid = max(
                resid,
                frobenius(blk.conj().T @ blk - eye),
                frobenius(blk @ blk.conj().T - eye),
            )
        unit_resids.append(resid)
        if resid > tol:
            msgs.append(f"d[{idx}] is not blockwise unitary (residual {resid:.3e})")
    norm_resid = rep.algebra.normalization_residual()
    if abs(norm_resid) > 1e-12:
        msgs.append(f"trace normalization residual {norm_resid:.3e}")
    return RepValidation(
        ok=not msgs,
        unitarity_residuals=tuple(unit_resids),
        normalization_residual=norm_resid,
        messages=tuple(msgs),
    )


def random_representation(
    n: int, algebra: TracialAlgebra, rng: np.random.Generator
) -> TraceRepresentation:
    """n independent blockwise-Haar unitaries; the generic planted instance."""
    return TraceRepresentation(algebra, tuple(algebra.random_unitary(rng) for _ in range(n)))

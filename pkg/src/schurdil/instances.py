"""Named example instances used by the CLI generator and the test suite."""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, TracialAlgebra
from .multiplier import SchurMultiplier
from .representation import TraceRepresentation, build_multiplier
from .search import planted_instance


def omega_rep(omega: complex) -> TraceRepresentation:
    """d = (1, omega) over the scalar algebra; needs |omega| = 1."""
    if abs(abs(omega) - 1.0) > 1e-12:
        raise ValueError(f"omega must be unimodular, got |omega| = {abs(omega)}")
    alg = TracialAlgebra.uniform((1,))
    d = (
        AlgebraElement(alg, [np.array([[1.0 + 0j]])]),
        AlgebraElement(alg, [np.array([[complex(omega)]])]),
    )
    return TraceRepresentation(alg, d)


def omega_multiplier(omega: complex) -> SchurMultiplier:
    """[[1, omega], [conj(omega), 1]]."""
    return build_multiplier(omega_rep(omega))


def allones_rep(n: int) -> TraceRepresentation:
    """Every d_i the unit; the table is all ones."""
    alg = TracialAlgebra.uniform((1,))
    unit = AlgebraElement(alg, [np.array([[1.0 + 0j]])])
    return TraceRepresentation(alg, (unit,) * n)


def allones_multiplier(n: int) -> SchurMultiplier:
    return build_multiplier(allones_rep(n))


def identity_fourier_rep(n: int) -> TraceRepresentation:
    """Fourier phases over C^n with uniform weights: the table is I_n."""
    alg = TracialAlgebra.uniform((1,) * n)
    d = []
    for i in range(n):
        blocks = [
            np.array([[np.exp(2j * np.pi * i * k / n)]], dtype=np.complex128) for k in range(n)
        ]
        d.append(AlgebraElement(alg, blocks))
    return TraceRepresentation(alg, tuple(d))


def identity_multiplier(n: int) -> SchurMultiplier:
    return SchurMultiplier(np.eye(n, dtype=np.complex128))


def pauli_rep() -> TraceRepresentation:
    """d = (I, X) over M_2 with the normalized trace; the table is I_2."""
    alg = TracialAlgebra.uniform((2,))
    d = (
        AlgebraElement(alg, [np.eye(2, dtype=np.complex128)]),
        AlgebraElement(alg, [np.array([[0, 1], [1, 0]], dtype=np.complex128)]),
    )
    return TraceRepresentation(alg, d)


def boundary_rep() -> TraceRepresentation:
    """d = (1, diag(1, i)) over C^2: exact inside the window, provably not
    one slot past it (the second moment of diag(1, i) is zero but its first
    moment is not)."""
    alg = TracialAlgebra.uniform((1, 1))
    d = (
        AlgebraElement(alg, [np.array([[1.0 + 0j]]), np.array([[1.0 + 0j]])]),
        AlgebraElement(alg, [np.array([[1.0 + 0j]]), np.array([[1j]])]),
    )
    return TraceRepresentation(alg, d)


def planted(n: int, spec, seed: int):
    """Random blockwise-Haar representation and its table; see search.planted_instance."""
    alg = spec if isinstance(spec, TracialAlgebra) else TracialAlgebra.uniform(tuple(spec))
    return planted_instance(n, alg, seed)

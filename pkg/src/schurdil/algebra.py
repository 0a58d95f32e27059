"""Finite-dimensional tracial von Neumann algebras N = ⊕_k M_{m_k}.

An algebra is a list of block sizes with strictly positive weights; the
normalized trace is tau(x) = sum_k lambda_k Tr(x_k) and the normalization
sum_k lambda_k m_k = 1 makes tau a state.  Elements embed block-diagonally
into M_M with M = sum_k m_k; the conditional expectation onto
M_n ⊗ N^{⊗K} ⊆ M_n ⊗ M_M^{⊗K} is a weighted partial trace over the K
window slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_TOL, as_matrix, dagger, frobenius, haar_unitary

NORMALIZATION_TOL = 1e-12


class MembershipError(ValueError):
    """Input lies outside the expected subalgebra; carries the offending norm."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class TracialAlgebra:
    """Block sizes and trace weights of ⊕_k M_{m_k}.

    ``check=False`` skips the normalization test so that validators can
    construct (and report on) a badly normalized algebra; strict loading
    and the canonical constructors always check.
    """

    blocks: tuple[int, ...]
    weights: tuple[float, ...]
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.blocks) == 0:
            raise ValueError("algebra needs at least one block")
        if len(self.blocks) != len(self.weights):
            raise ValueError("blocks and weights must have equal length")
        if any(b < 1 for b in self.blocks):
            raise ValueError("block sizes must be positive integers")
        if any(not np.isfinite(w) or w <= 0 for w in self.weights):
            raise ValueError("weights must be positive and finite")
        if self.check and abs(self.normalization_residual()) > NORMALIZATION_TOL:
            raise ValueError(
                f"trace is not normalized: sum lambda_k m_k = {self.trace_of_unit():.17g}"
            )

    @staticmethod
    def uniform(blocks) -> "TracialAlgebra":
        """Equal mass per block: lambda_b = 1 / (r * m_b)."""
        blocks = tuple(int(b) for b in blocks)
        r = len(blocks)
        return TracialAlgebra(blocks, tuple(1.0 / (r * b) for b in blocks))

    @property
    def dim(self) -> int:
        """Embedding dimension M = sum of block sizes."""
        return sum(self.blocks)

    def trace_of_unit(self) -> float:
        return float(sum(w * b for w, b in zip(self.weights, self.blocks)))

    def normalization_residual(self) -> float:
        return self.trace_of_unit() - 1.0

    def weight_vector(self) -> np.ndarray:
        """Length-M vector w with tau(x) = sum_p w_p * embed(x)_pp."""
        return np.repeat(np.asarray(self.weights), np.asarray(self.blocks))

    def block_mask(self) -> np.ndarray:
        """M x M boolean mask of the block-diagonal support."""
        m = self.dim
        mask = np.zeros((m, m), dtype=bool)
        off = 0
        for b in self.blocks:
            mask[off : off + b, off : off + b] = True
            off += b
        return mask

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(b, dtype=np.complex128) for b in self.blocks])

    def random_element(self, rng: np.random.Generator) -> "AlgebraElement":
        from .linalg import random_complex

        return AlgebraElement(self, [random_complex(rng, b, b) for b in self.blocks])

    def random_unitary(self, rng: np.random.Generator) -> "AlgebraElement":
        """Blockwise Haar unitary element."""
        return AlgebraElement(self, [haar_unitary(rng, b) for b in self.blocks])


@dataclass(frozen=True)
class AlgebraElement:
    """One element of a tracial algebra, stored blockwise."""

    algebra: TracialAlgebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(as_matrix(b, rows=s, cols=s) for b, s in zip(self.blocks, self.algebra.blocks))
        if len(mats) != len(self.algebra.blocks):
            raise ValueError("element needs one block per algebra block")
        object.__setattr__(self, "blocks", mats)

    def dagger(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [dagger(b) for b in self.blocks])

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        if other.algebra.blocks != self.algebra.blocks:
            raise ValueError("elements live in different algebras")
        return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def is_unitary(self, tol: float = DEFAULT_TOL) -> bool:
        from .linalg import is_unitary

        return all(is_unitary(b, tol) for b in self.blocks)


def trace(x: AlgebraElement) -> complex:
    """Weighted trace tau(x) = sum_k lambda_k Tr(x_k)."""
    return complex(sum(w * np.trace(b) for w, b in zip(x.algebra.weights, x.blocks)))


def embed(x: AlgebraElement) -> np.ndarray:
    """Block-diagonal image of x in M_M."""
    m = x.algebra.dim
    out = np.zeros((m, m), dtype=np.complex128)
    off = 0
    for b in x.blocks:
        s = b.shape[0]
        out[off : off + s, off : off + s] = b
        off += s
    return out


def weighted_trace(y: np.ndarray, n: int, algebra: TracialAlgebra, window: int) -> complex:
    """(tr ⊗ tau^{⊗K})(y) on M_n ⊗ M_M^{⊗K}, diagonal-weighted.

    Agrees with the algebraic trace on members of M_n ⊗ N^{⊗K} and is the
    linear extension used everywhere else.
    """
    m = algebra.dim
    d = n * m**window
    y = as_matrix(y, rows=d, cols=d)
    w = algebra.weight_vector()
    big = np.ones(n)
    for _ in range(window):
        big = np.kron(big, w)
    return complex(np.sum(np.diagonal(y) * big))


def _split_axes(y: np.ndarray, n: int, m: int, window: int) -> np.ndarray:
    return y.reshape((n,) + (m,) * window + (n,) + (m,) * window)


def membership_residual(y: np.ndarray, n: int, algebra: TracialAlgebra, window: int) -> float:
    """Frobenius distance from y to the slot-wise block-diagonal subspace.

    The subspace is M_n ⊗ N^{⊗K}: every window slot must be supported on
    the block diagonal of M_M.  Zero (up to roundoff) iff y is a member.
    """
    m = algebra.dim
    d = n * m**window
    y = as_matrix(y, rows=d, cols=d)
    yt = _split_axes(y, n, m, window).copy()
    mask = algebra.block_mask()
    for k in range(window):
        shape = [1] * yt.ndim
        shape[1 + k] = m
        shape[2 + window + k] = m
        yt *= mask.reshape(shape)
    return frobenius(y - yt.reshape(d, d))


def cond_expectation(
    y: np.ndarray,
    n: int,
    algebra: TracialAlgebra,
    window: int,
    tol: float = 1e-8,
) -> np.ndarray:
    """Conditional expectation E: M_n ⊗ N^{⊗K} -> M_n, weighted partial trace.

    E(y)_{ab} = sum_{i_1..i_K} y[(a, i), (b, i)] * prod_k w_{i_k}, the
    adjoint of z -> z ⊗ 1 for the weighted inner products on both sides.
    Inputs further than ``tol`` from the subalgebra raise MembershipError
    with the diagnostic distance; pass ``tol=None`` to skip the check.
    """
    m = algebra.dim
    d = n * m**window
    y = as_matrix(y, rows=d, cols=d)
    if tol is not None:
        resid = membership_residual(y, n, algebra, window)
        if resid > tol:
            raise MembershipError("input is not in M_n tensor N^window", resid)
    yt = _split_axes(y, n, m, window)
    w = algebra.weight_vector()
    # einsum 'a i j k b i j k, i, j, k -> a b' built for the window size
    letters = "cdefghij"[:window]
    spec = "a" + letters + "b" + letters + "," + ",".join(letters) + "->ab"
    return np.einsum(spec, yt, *([w] * window))

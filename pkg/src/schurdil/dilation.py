"""Exact finite-window dilations of trace-form Schur multipliers.

The ambient space is M_n ⊗ M_M^{⊗K} (M = embedding dimension of the
algebra, K = window length).  One unitary

    V = Dhat^dagger (I_n ⊗ P_cyc),   Dhat = sum_i E_ii ⊗ embed(d_i) ⊗ 1^{K-1}

drives the automorphism U = Ad(V): y -> V y V^dagger.  Rotating the window
first and conjugating slot 1 afterwards deposits d_i^dagger d_j factors one
slot per step, so for z in M_n and k <= K

    E(U^k(z ⊗ 1)) = m^{∘k} ⊙ z,      m[i, j] = tau(d_i^dagger d_j),

with E the weighted partial trace back onto M_n.  Past the window the
cyclic wrap revisits slot 1 and the identity genuinely fails (unless all
d_i^dagger d_j commute, as for scalar algebras, which stay exact forever).
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    TracialAlgebra,
    cond_expectation,
    embed,
    membership_residual,
    weighted_trace,
)
from .linalg import as_matrix, dagger, frobenius, is_unitary, kron, matrix_unit, random_complex
from .multiplier import SchurMultiplier, rank1, schur_apply
from .representation import TraceRepresentation, build_multiplier

DEFAULT_DIM_CAP = 4096
DIM_CAP_ENV = "SCHURDIL_DIM_CAP"


def _dim_cap(override: int | None) -> int:
    if override is not None:
        return int(override)
    return int(os.environ.get(DIM_CAP_ENV, DEFAULT_DIM_CAP))


def _cyclic_shift_matrix(m: int, window: int) -> np.ndarray:
    """Permutation P with P e_{i_1..i_K} = e_{i_K i_1 .. i_{K-1}}."""
    size = m**window
    p = np.zeros((size, size), dtype=np.complex128)
    idx = np.arange(size)
    digits = np.unravel_index(idx, (m,) * window)
    rolled = (digits[-1],) + digits[:-1]
    target = np.ravel_multi_index(rolled, (m,) * window)
    p[target, idx] = 1.0
    return p


@dataclass(frozen=True)
class DilationSystem:
    rep: TraceRepresentation
    window: int
    v: np.ndarray = field(repr=False)
    diagnostics: dict = field(repr=False)

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def algebra(self) -> TracialAlgebra:
        return self.rep.algebra

    @property
    def dim(self) -> int:
        return self.n * self.algebra.dim**self.window


def build(
    rep: TraceRepresentation,
    window: int,
    dim_cap: int | None = None,
    check: bool = True,
    tol: float = 1e-10,
) -> DilationSystem:
    """Assemble V and sanity-check the automorphism it generates.

    Checks (skippable with ``check=False``): V unitary; Ad(V) keeps
    generator images inside M_n ⊗ N^{⊗K}; the weighted trace of a random
    member is preserved.  Raises when n * M^K exceeds the dimension cap
    (default 4096, overridable per call or via SCHURDIL_DIM_CAP).
    """
    if window < 1:
        raise ValueError("window length must be at least 1")
    n = rep.n
    m = rep.algebra.dim
    dim = n * m**window
    cap = _dim_cap(dim_cap)
    if dim > cap:
        raise ValueError(f"ambient dimension {dim} = {n}*{m}^{window} exceeds the cap {cap}")

    tail = np.eye(m ** (window - 1), dtype=np.complex128)
    dhat = np.zeros((dim, dim), dtype=np.complex128)
    slot = m**window
    for i in range(n):
        blk = kron(embed(rep.d[i]), tail)
        dhat[i * slot : (i + 1) * slot, i * slot : (i + 1) * slot] = blk
    shift = kron(np.eye(n, dtype=np.complex128), _cyclic_shift_matrix(m, window))
    v = dagger(dhat) @ shift

    diagnostics: dict = {"dim": dim}
    if check:
        eye = np.eye(dim)
        diagnostics["unitarity_residual"] = max(
            frobenius(dagger(v) @ v - eye), frobenius(v @ dagger(v) - eye)
        )
        if diagnostics["unitarity_residual"] > tol:
            raise ValueError("V failed the unitarity check")
        sys = DilationSystem(rep=rep, window=window, v=v, diagnostics=diagnostics)
        rng = np.random.default_rng(0)
        gen_resid = 0.0
        zs = [matrix_unit(n, 0, n - 1), random_complex(rng, n, n)]
        for z in zs:
            img = step(sys, embed_J(sys, z), 1)
            gen_resid = max(gen_resid, membership_residual(img, n, rep.algebra, window))
        w = rep.algebra.random_element(rng)
        y = kron(random_complex(rng, n, n), kron(embed(w), tail))
        img = step(sys, y, 1)
        gen_resid = max(gen_resid, membership_residual(img, n, rep.algebra, window))
        diagnostics["generator_membership_residual"] = gen_resid
        if gen_resid > max(tol, 1e-8):
            raise ValueError("Ad(V) left the subalgebra on a generator")
        tr_resid = abs(
            weighted_trace(img, n, rep.algebra, window) - weighted_trace(y, n, rep.algebra, window)
        )
        diagnostics["trace_preservation_residual"] = tr_resid
        return sys
    return DilationSystem(rep=rep, window=window, v=v, diagnostics=diagnostics)


def embed_J(sys: DilationSystem, z: np.ndarray) -> np.ndarray:
    """J(z) = z ⊗ 1^{⊗K}."""
    z = as_matrix(z, rows=sys.n, cols=sys.n)
    return kron(z, np.eye(sys.algebra.dim ** sys.window, dtype=np.complex128))


def expectation(sys: DilationSystem, y: np.ndarray, tol: float | None = 1e-8) -> np.ndarray:
    """E(y): weighted partial trace back onto M_n (membership-checked)."""
    return cond_expectation(y, sys.n, sys.algebra, sys.window, tol=tol)


def step(sys: DilationSystem, y: np.ndarray, k: int) -> np.ndarray:
    """Ad(V)^k(y) = V^k y (V^k)^dagger.

    Any k >= 0 is computed; k past the window carries no exactness
    guarantee and is flagged with a warning.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > sys.window:
        warnings.warn(
            f"k={k} exceeds the window K={sys.window}; the dilation identity is not guaranteed",
            stacklevel=2,
        )
    y = as_matrix(y, rows=sys.dim, cols=sys.dim)
    for _ in range(k):
        y = sys.v @ y @ dagger(sys.v)
    return y


@dataclass(frozen=True)
class VerifyEntry:
    k: int
    max_residual: float
    ok: bool


@dataclass(frozen=True)
class VerifyReport:
    entries: tuple[VerifyEntry, ...]
    tol: float
    ok: bool


def verify_dilation(
    sys: DilationSystem,
    k_max: int | None = None,
    tol: float = 1e-10,
    n_random: int = 10,
    seed: int = 0,
) -> VerifyReport:
    """Check E(U^k(J(z))) = m^{∘k} ⊙ z for every k <= k_max.

    Observables: all matrix units plus ``n_random`` seeded dense matrices.
    k_max defaults to the window and may not exceed it (use
    beyond_window_residual for the failure regime).
    """
    k_max = sys.window if k_max is None else int(k_max)
    if k_max > sys.window:
        raise ValueError(f"k_max={k_max} exceeds the window K={sys.window}")
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    n = sys.n
    phi = build_multiplier(sys.rep)
    rng = np.random.default_rng(seed)
    observables = [matrix_unit(n, i, j) for i in range(n) for j in range(n)]
    observables += [random_complex(rng, n, n) for _ in range(n_random)]

    states = [embed_J(sys, z) for z in observables]
    entries = []
    for k in range(k_max + 1):
        worst = 0.0
        for z, y in zip(observables, states):
            expected = schur_apply(phi.power(k), z)
            worst = max(worst, frobenius(expectation(sys, y, tol=None) - expected))
        entries.append(VerifyEntry(k=k, max_residual=worst, ok=worst <= tol))
        if k < k_max:
            states = [sys.v @ y @ dagger(sys.v) for y in states]
    return VerifyReport(entries=tuple(entries), tol=tol, ok=all(e.ok for e in entries))


def beyond_window_residual(sys: DilationSystem, k: int, z: np.ndarray | None = None) -> float:
    """Residual of the dilation identity at arbitrary k, matrix units by default.

    Exists so the failure of the identity past the window can be measured;
    verify_dilation deliberately refuses k_max > K.
    """
    n = sys.n
    phi = build_multiplier(sys.rep)
    observables = (
        [z] if z is not None else [matrix_unit(n, i, j) for i in range(n) for j in range(n)]
    )
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for obs in observables:
            y = step(sys, embed_J(sys, obs), k)
            expected = schur_apply(phi.power(k), obs)
            worst = max(worst, frobenius(expectation(sys, y, tol=None) - expected))
    return worst


def pairing_closed_form(rep: TraceRepresentation, k: int, u, v, a, b) -> complex:
    """sum_{i,j} a_i b_j u_j v_i tau(d_i^dagger d_j)^k, no conjugations."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = rep.n
    u, v, a, b = (np.asarray(x, dtype=np.complex128).reshape(-1) for x in (u, v, a, b))
    for vec in (u, v, a, b):
        if vec.shape != (n,):
            raise ValueError(f"vectors must have length {n}")
    m = build_multiplier(rep).m
    return complex((a * v) @ m**k @ (b * u))


def big_space_pairing(sys: DilationSystem, k: int, u, v, a, b) -> complex:
    """<U^k(J(rank1(u, v))), rank1(a, b) ⊗ 1> in the ambient weighted trace."""
    y = step(sys, embed_J(sys, rank1(u, v)), k)
    eta = embed_J(sys, rank1(a, b))
    return weighted_trace(y @ eta, sys.n, sys.algebra, sys.window)


def _diag_blocks(c: np.ndarray, n: int, h: int, tol: float) -> np.ndarray:
    """Extract the n diagonal h x h blocks, validating block-diagonality."""
    c = as_matrix(c, rows=n * h, cols=n * h)
    ct = c.reshape(n, h, n, h)
    blocks = np.stack([ct[s, :, s, :] for s in range(n)])
    rebuilt = np.zeros_like(c)
    for s in range(n):
        rebuilt[s * h : (s + 1) * h, s * h : (s + 1) * h] = blocks[s]
    resid = frobenius(c - rebuilt)
    if resid > tol:
        raise ValueError(f"operator is not block-diagonal over the n-index (residual {resid:.3e})")
    return blocks


def slice_identity_check(
    c: np.ndarray,
    d: np.ndarray,
    u,
    v,
    a,
    b,
    n: int,
    h: int,
    tol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Slice identity behind the closed pairing form, on M_n ⊗ B(H).

    Left side, computed literally on the big space: slice the trace-class
    functional rank1(a, b) through C (rank1(u, v) ⊗ I_H) D.  Right side,
    computed blockwise: reindex the slice through the diagonal blocks,
    (sum_s a_s v_s C_s)(sum_t b_t u_t D_t).  Returns (lhs, rhs, residual);
    C and D must be block-diagonal over the n-index.
    """
    u, v, a, b = (np.asarray(x, dtype=np.complex128).reshape(-1) for x in (u, v, a, b))
    cb = _diag_blocks(c, n, h, tol)
    db = _diag_blocks(d, n, h, tol)

    w = as_matrix(c) @ kron(rank1(u, v), np.eye(h, dtype=np.complex128)) @ as_matrix(d)
    wt = w.reshape(n, h, n, h)
    lhs = np.einsum("s,t,sptq->pq", a, b, wt)

    rhs = np.einsum("s,s,spq->pq", a, v, cb) @ np.einsum("t,t,tpq->pq", b, u, db)
    return lhs, rhs, frobenius(lhs - rhs)

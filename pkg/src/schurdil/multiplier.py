"""Schur multipliers on M_n: entrywise maps, pairings, positivity, norms.

Index convention, used everywhere in this package: the symbol table m acts
entrywise as

    T_m(a)[s, t] = m[s, t] * a[s, t]        (s = row, t = column),

and rank1(u, v)[s, t] = v[s] * u[t].  All pairings below are bilinear, with
no hidden conjugation: pairing(phi, u, v, a, b) = sum_{s,t} m[s,t] u[t]
v[s] a[s] b[t].  Factorization witnesses use the inner product
<x, y> = sum_r x[r] * conj(y[r]) (linear in the first slot), so a witness
(alpha, beta) certifies m[s, t] = <alpha_t, beta_s>.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    dagger,
    frobenius,
    matrix_unit,
    opnorm,
    psd_check,
    psd_factor,
    random_complex,
)

FLAG_TOL = 1e-10


def rank1(u, v) -> np.ndarray:
    """Rank-one matrix with entries v[s] * u[t]."""
    u = np.asarray(u, dtype=np.complex128).reshape(-1)
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    return np.outer(v, u)


@dataclass(frozen=True)
class SchurMultiplier:
    """An n x n symbol table with cached structural flags."""

    m: np.ndarray

    def __post_init__(self):
        mat = as_matrix(self.m)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError(f"symbol table must be square, got {mat.shape}")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "m", mat)

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @cached_property
    def hermitian(self) -> bool:
        return frobenius(self.m - dagger(self.m)) <= FLAG_TOL

    @cached_property
    def unital_diag(self) -> bool:
        return bool(np.max(np.abs(np.diagonal(self.m) - 1.0)) <= FLAG_TOL)

    @cached_property
    def psd(self) -> bool:
        if not self.hermitian:
            return False
        return psd_check(self.m, FLAG_TOL)

    @cached_property
    def real(self) -> bool:
        return bool(np.max(np.abs(self.m.imag)) <= FLAG_TOL)

    def power(self, k: int) -> "SchurMultiplier":
        """Entrywise power: the symbol of T_m composed k times."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        return SchurMultiplier(self.m**k)


def schur_apply(phi: SchurMultiplier, a: np.ndarray) -> np.ndarray:
    """Entrywise product m ⊙ a."""
    a = as_matrix(a, rows=phi.n, cols=phi.n)
    return phi.m * a


def pairing(phi: SchurMultiplier, u, v, a, b) -> complex:
    """Bilinear form sum_{s,t} m[s,t] u[t] v[s] a[s] b[t].

    Equals tr(schur_apply(phi, rank1(u, v)) @ rank1(a, b)).
    """
    n = phi.n
    u, v, a, b = (np.asarray(x, dtype=np.complex128).reshape(-1) for x in (u, v, a, b))
    for vec in (u, v, a, b):
        if vec.shape != (n,):
            raise ValueError(f"vectors must have length {n}")
    return complex((v * a) @ phi.m @ (u * b))


@dataclass(frozen=True)
class CpResult:
    ok: bool
    alpha: np.ndarray | None  # rows alpha_t; m[s,t] ~ <alpha_t, alpha_s>
    min_eigenvalue: float
    message: str


def cp_check(phi: SchurMultiplier, tol: float = DEFAULT_TOL) -> CpResult:
    """Complete positivity of T_m, i.e. PSD-ness of the symbol table.

    On success the witness rows satisfy m[s, t] = <alpha_t, alpha_s> up to
    the eigenvalue clipping; non-Hermitian or indefinite tables return
    ok=False with a diagnostic instead of raising.
    """
    m = phi.m
    herm_resid = frobenius(m - dagger(m))
    if herm_resid > tol:
        return CpResult(False, None, float("nan"), f"symbol table is not Hermitian (residual {herm_resid:.3e})")
    w = np.linalg.eigvalsh(0.5 * (m + dagger(m)))
    lam_min = float(w.min(initial=0.0))
    if lam_min < -tol:
        return CpResult(False, None, lam_min, f"symbol table has negative eigenvalue {lam_min:.3e}")
    keep = w > max(tol, 0.0)
    ncols = max(int(np.count_nonzero(keep)), 1)
    ell = psd_factor(m, tol)  # rows: Gram vectors, m = L L^dagger
    order = np.argsort(w)[::-1][:ncols]
    alpha = ell[:, order].conj()  # row t is alpha_t; <alpha_t, alpha_s> = m[s,t]
    return CpResult(True, alpha, lam_min, "ok")


@dataclass(frozen=True)
class NormBounds:
    lower: float
    upper: float
    alpha: np.ndarray  # rows alpha_t, ||alpha_t||^2 <= upper-ish
    beta: np.ndarray  # rows beta_s
    feasibility_residual: float
    bisection_steps: int

    def witness_residual(self, phi: SchurMultiplier) -> float:
        """Frobenius error of m[s,t] = <alpha_t, beta_s> for this witness."""
        recon = np.einsum("tr,sr->st", self.alpha, self.beta.conj())
        return frobenius(phi.m - recon)


def _probe_lower(phi: SchurMultiplier, rng: np.random.Generator, n_random: int = 6) -> float:
    """Certified lower bound: max over probes of ||T_m(a)||_op / ||a||_op."""
    n = phi.n
    probes = [matrix_unit(n, i, j) for i in range(n) for j in range(n)]
    probes.append(np.ones((n, n), dtype=np.complex128))
    probes.append(phi.m.conj())  # phase-stripping probe: T_m(conj m) = |m|^2
    for _ in range(n_random):
        probes.append(random_complex(rng, n, n))
    best = 0.0
    for a in probes:
        na = opnorm(a)
        if na < 1e-14:
            continue
        best = max(best, opnorm(schur_apply(phi, a)) / na)
    return best


def _project_psd(z: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (z + dagger(z)))
    w = np.clip(w, 0.0, None)
    return (v * w) @ dagger(v)


def _project_data(z: np.ndarray, m: np.ndarray, c: float) -> np.ndarray:
    """Project onto {Hermitian, off-diagonal blocks fixed to m, diag <= c}."""
    n = m.shape[0]
    z = 0.5 * (z + dagger(z))
    z[:n, n:] = m
    z[n:, :n] = dagger(m)
    d = np.diagonal(z).real
    np.fill_diagonal(z, np.minimum(d, c))
    return z


def _dykstra_feasibility(
    m: np.ndarray,
    c: float,
    max_iter: int,
    tol: float,
) -> tuple[bool, np.ndarray, float]:
    """Dykstra alternation between the PSD cone and the data/box set.

    Returns (feasible, psd_iterate, residual); the residual is the gap
    between the two projections, which stalls at the inter-set distance
    when the sets miss each other.
    """
    n = m.shape[0]
    x = np.block([[c * np.eye(n), m], [dagger(m), c * np.eye(n)]]).astype(np.complex128)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    best = np.inf
    stall = 0
    y = x
    for it in range(max_iter):
        y = _project_psd(x + p)
        p = x + p - y
        x_new = _project_data(y + q, m, c)
        q = y + q - x_new
        x = x_new
        resid = frobenius(y - x)
        if resid < tol:
            return True, y, resid
        if resid < best * (1.0 - 1e-7):
            best = resid
            stall = 0
        else:
            stall += 1
            if stall > 60 and it > 80:
                break
    return False, y, frobenius(y - x)


def _witness_from_completion(z: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Split the Gram factor of a PSD completion into (alpha, beta) rows."""
    ell = psd_factor(z, tol=1e-8)
    beta = ell[:n].conj()  # beta_s = conj(row s)
    alpha = ell[n:].conj()  # alpha_t = conj(row n + t)
    return alpha, beta


def norm_bounds(
    phi: SchurMultiplier,
    tol: float = 1e-6,
    seed: int = 7,
    dykstra_iters: int = 6000,
    dykstra_tol: float = 1e-11,
    max_bisect: int = 80,
    use_gram_shortcut: bool = True,
) -> NormBounds:
    """Two-sided bracket for the multiplier norm of T_m with a witness.

    Lower bound: best probe ratio (matrix units, all-ones, seeded Gaussians,
    the phase-stripping probe).  Upper bound: least C for which the block
    completion [[X, m], [m*, Y]] with diag <= C is PSD-completable, found by
    bisection with a Dykstra feasibility oracle; for PSD tables the Gram
    factor of m itself settles the question at C = max_t m[t, t] without
    bisection (disable via ``use_gram_shortcut`` to force the general path).
    Always returns lower <= upper + tol; non-convergence of the feasibility
    search leaves the last certainly-feasible C in place rather than failing.
    """
    m = phi.m
    n = phi.n
    rng = np.random.default_rng(seed)
    lower = _probe_lower(phi, rng)

    if use_gram_shortcut and phi.psd:
        res = cp_check(phi)
        alpha = res.alpha
        norms = np.linalg.norm(alpha, axis=1) ** 2
        recon = np.einsum("tr,sr->st", alpha, alpha.conj())
        slack = frobenius(m - recon) * np.sqrt(n)
        upper = float(norms.max() + slack)
        return NormBounds(
            lower=min(lower, upper),
            upper=upper,
            alpha=alpha,
            beta=alpha.copy(),
            feasibility_residual=frobenius(m - recon),
            bisection_steps=0,
        )

    hi = max(opnorm(m), lower, 1e-12)
    lo = min(lower, hi)
    # The spectral completion [[hi*I, m], [m*, hi*I]] is PSD, so hi is feasible.
    feasible_c = hi
    ok, z_best, best_resid = True, None, 0.0
    steps = 0
    while hi - lo > tol * 0.5 and steps < max_bisect:
        mid = 0.5 * (lo + hi)
        ok, z, resid = _dykstra_feasibility(m, mid, dykstra_iters, dykstra_tol)
        steps += 1
        if ok:
            hi = mid
            feasible_c = mid
            z_best, best_resid = z, resid
        else:
            lo = mid
    if z_best is None:
        ok, z_best, best_resid = _dykstra_feasibility(m, feasible_c, dykstra_iters, dykstra_tol)
        if not ok:
            # fall back to the explicit spectral completion
            z_best = np.block(
                [[feasible_c * np.eye(n), m], [dagger(m), feasible_c * np.eye(n)]]
            ).astype(np.complex128)
            best_resid = 0.0
    alpha, beta = _witness_from_completion(_project_psd(z_best), n)
    upper = feasible_c
    return NormBounds(
        lower=min(lower, upper + tol),
        upper=upper,
        alpha=alpha,
        beta=beta,
        feasibility_residual=best_resid,
        bisection_steps=steps,
    )

"""Recover a trace representation for a given symbol table, if one exists
at the requested algebra size.

The variables are blockwise unitaries d_2..d_n (d_1 stays gauge-fixed at
the unit); the objective is the squared Frobenius mismatch between the
target table and tau(d_i^dagger d_j).  Descent runs on the product unitary
group via Cayley retractions of the skew-projected gradient with Armijo
backtracking, restarted from structured warm starts and seeded random
points.  Failure to converge means no representation was found at this
size and budget; it is never evidence that none exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, TracialAlgebra
from .linalg import frobenius, haar_unitary
from .multiplier import SchurMultiplier
from .representation import (
    TraceRepresentation,
    build_multiplier,
    gauge_normalize,
    random_representation,
)

SCREEN_TOL = 1e-8


class TargetRejected(ValueError):
    """Target fails a necessary condition for trace-form symbols."""

    def __init__(self, condition: str, detail: str):
        super().__init__(f"target rejected ({condition}): {detail}")
        self.condition = condition


def screen_target(phi: SchurMultiplier, tol: float = SCREEN_TOL) -> None:
    """Necessary conditions: Hermitian, unital diagonal, unit-disk entries, PSD."""
    m = phi.m
    herm = frobenius(m - m.conj().T)
    if herm > tol:
        raise TargetRejected("hermitian", f"||m - m*||_F = {herm:.3e}")
    diag_err = float(np.max(np.abs(np.diagonal(m) - 1.0)))
    if diag_err > tol:
        raise TargetRejected("unital diagonal", f"max |m_ii - 1| = {diag_err:.3e}")
    disk = float(np.max(np.abs(m)))
    if disk > 1.0 + tol:
        raise TargetRejected("unit disk", f"max |m_ij| = {disk:.9f} > 1")
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
    if lam_min < -tol:
        raise TargetRejected("positive semidefinite", f"min eigenvalue = {lam_min:.3e}")


def loss(rep: TraceRepresentation, target: SchurMultiplier) -> float:
    """Squared Frobenius distance between the target table and the rep's table."""
    return frobenius(build_multiplier(rep).m - target.m) ** 2


def _residual_matrix(rep: TraceRepresentation, target: SchurMultiplier) -> np.ndarray:
    return build_multiplier(rep).m - target.m


def euclidean_gradient(rep: TraceRepresentation, target: SchurMultiplier) -> list[list[np.ndarray]]:
    """Wirtinger gradient of the loss w.r.t. conj(d_k), blockwise.

    d/dconj(d_k,b) of sum |R_ij|^2 with R = G - m and
    G_ij = sum_b lambda_b Tr(d_i,b^dagger d_j,b) is
    lambda_b * sum_j (conj(R_kj) + R_jk) d_j,b.
    """
    r = _residual_matrix(rep, target)
    coeff = r.conj() + r.T  # coeff[k, j] multiplies d_j in grad_k
    grads = []
    for k in range(rep.n):
        per_block = []
        for b, lam in enumerate(rep.algebra.weights):
            acc = np.zeros_like(rep.d[k].blocks[b])
            for j in range(rep.n):
                acc += coeff[k, j] * rep.d[j].blocks[b]
            per_block.append(lam * acc)
        grads.append(per_block)
    return grads


def skew_directions(rep: TraceRepresentation, target: SchurMultiplier) -> list[list[np.ndarray]]:
    """Gradient pulled back to the identity and skew-projected; index 0 is
    zeroed to hold the gauge."""
    egrads = euclidean_gradient(rep, target)
    out = []
    for k in range(rep.n):
        per_block = []
        for b in range(len(rep.algebra.blocks)):
            if k == 0:
                per_block.append(np.zeros_like(rep.d[k].blocks[b]))
                continue
            m_mat = egrads[k][b] @ rep.d[k].blocks[b].conj().T
            per_block.append(0.5 * (m_mat - m_mat.conj().T))
        out.append(per_block)
    return out


def _cayley(a: np.ndarray) -> np.ndarray:
    eye = np.eye(a.shape[0], dtype=np.complex128)
    return np.linalg.solve(eye - 0.5 * a, eye + 0.5 * a)


def riemannian_step(
    rep: TraceRepresentation, skews: list[list[np.ndarray]], eta: float
) -> TraceRepresentation:
    """Move each d_k along -eta * skew_k with the Cayley retraction.

    The retraction (I - A/2)^{-1}(I + A/2) d is exactly unitary for skew A;
    a singular solve (possible only for ||A|| >= 2) halves the step.
    """
    new_d = []
    for k in range(rep.n):
        blocks = []
        for b in range(len(rep.algebra.blocks)):
            a = -eta * skews[k][b]
            scale = 1.0
            for _ in range(60):
                try:
                    cay = _cayley(scale * a)
                    break
                except np.linalg.LinAlgError:
                    scale *= 0.5
            blocks.append(cay @ rep.d[k].blocks[b])
        new_d.append(AlgebraElement(rep.algebra, blocks))
    return TraceRepresentation(rep.algebra, tuple(new_d))


def directional_derivative(
    rep: TraceRepresentation, target: SchurMultiplier, direction: list[list[np.ndarray]]
) -> float:
    """d/d eta of loss(retract(rep, eta * direction)) at eta = 0."""
    egrads = euclidean_gradient(rep, target)
    total = 0.0
    for k in range(rep.n):
        for b in range(len(rep.algebra.blocks)):
            delta = direction[k][b] @ rep.d[k].blocks[b]
            total += 2.0 * float(np.real(np.sum(egrads[k][b].conj() * delta)))
    return total


def _skew_basis(q: int) -> list[np.ndarray]:
    """Real basis of the skew-Hermitian q x q matrices (q^2 elements)."""
    basis = []
    for p in range(q):
        a = np.zeros((q, q), dtype=np.complex128)
        a[p, p] = 1j
        basis.append(a)
    for p in range(q):
        for r in range(p + 1, q):
            a = np.zeros((q, q), dtype=np.complex128)
            a[p, r] = 1.0
            a[r, p] = -1.0
            basis.append(a)
            a = np.zeros((q, q), dtype=np.complex128)
            a[p, r] = 1j
            a[r, p] = 1j
            basis.append(a)
    return basis


def _gauss_newton_polish(
    target: SchurMultiplier,
    rep: TraceRepresentation,
    max_iters: int,
    target_residual: float,
) -> tuple[TraceRepresentation, float]:
    """Levenberg-damped Gauss-Newton on the tangent coordinates.

    First-order descent stalls in the ill-conditioned tail of this least
    squares problem; the normal-equation step restores fast local
    convergence.  The gauge keeps d_1 out of the parameter list.
    """
    n = rep.n
    blocks = rep.algebra.blocks
    weights = rep.algebra.weights
    bases = {b: _skew_basis(q) for b, q in enumerate(blocks)}
    mu = 1e-8
    cur = loss(rep, target)
    for _ in range(max_iters):
        if np.sqrt(cur) <= target_residual * 0.01:
            break
        resid = _residual_matrix(rep, target).reshape(-1)
        r_vec = np.concatenate([resid.real, resid.imag])
        cols = []
        layout = []  # (k, b, basis element) per column
        for k in range(1, n):
            for b, lam in enumerate(weights):
                dk = rep.d[k].blocks[b]
                for a in bases[b]:
                    dg = np.zeros((n, n), dtype=np.complex128)
                    adk = a @ dk
                    for i in range(n):
                        # d/dt tau(d_i^dagger d_k) along d_k -> (I + tA) d_k
                        dg[i, k] += lam * np.trace(rep.d[i].blocks[b].conj().T @ adk)
                    for j in range(n):
                        # Tr((A d_k)^dagger d_j) = -Tr(d_k^dagger A d_j) for skew A
                        dg[k, j] += lam * np.trace(adk.conj().T @ rep.d[j].blocks[b])
                    cols.append(np.concatenate([dg.reshape(-1).real, dg.reshape(-1).imag]))
                    layout.append((k, b, a))
        jac = np.stack(cols, axis=1)
        jtj = jac.T @ jac
        jtr = jac.T @ r_vec
        improved = False
        for _ in range(12):
            try:
                t = np.linalg.solve(jtj + mu * np.eye(jtj.shape[0]), -jtr)
            except np.linalg.LinAlgError:
                mu *= 10.0
                continue
            skews = [
                [np.zeros((q, q), dtype=np.complex128) for q in blocks] for _ in range(n)
            ]
            for coeff, (k, b, a) in zip(t, layout):
                skews[k][b] = skews[k][b] + coeff * a
            cand = riemannian_step(rep, skews, -1.0)  # move along +skews
            cand_loss = loss(cand, target)
            if cand_loss < cur:
                rep, cur = cand, cand_loss
                mu = max(mu * 0.3, 1e-12)
                improved = True
                break
            mu *= 10.0
        if not improved:
            break
    return rep, float(np.sqrt(cur))


def _optimize(
    target: SchurMultiplier,
    rep: TraceRepresentation,
    max_iters: int,
    eta0: float,
    target_residual: float,
    gtol: float = 1e-13,
) -> tuple[TraceRepresentation, float, list[float]]:
    cur = loss(rep, target)
    eta = eta0
    trace = [float(np.sqrt(cur))]
    for _ in range(max_iters):
        if np.sqrt(cur) <= target_residual * 0.1:
            break
        skews = skew_directions(rep, target)
        gnorm2 = sum(
            float(np.sum(np.abs(s) ** 2)) for per_block in skews for s in per_block
        )
        if np.sqrt(gnorm2) < gtol:
            break
        moved = False
        while eta > 1e-15:
            cand = riemannian_step(rep, skews, eta)
            cand_loss = loss(cand, target)
            if cand_loss <= cur - 1e-4 * eta * 2.0 * gnorm2:
                rep, cur, moved = cand, cand_loss, True
                break
            eta *= 0.5
        if not moved:
            break
        trace.append(float(np.sqrt(cur)))
        eta = min(eta * 1.7, 1.0)
    if np.sqrt(cur) > target_residual * 0.1:
        rep, res = _gauss_newton_polish(target, rep, 40, target_residual)
        if res < np.sqrt(cur):
            cur = res**2
            trace.append(res)
    return rep, float(np.sqrt(cur)), trace


def _fourier_start(n: int, algebra: TracialAlgebra) -> TraceRepresentation | None:
    if any(b != 1 for b in algebra.blocks):
        return None
    r = len(algebra.blocks)
    d = []
    for i in range(n):
        blocks = [
            np.array([[np.exp(2j * np.pi * i * b / r)]], dtype=np.complex128) for b in range(r)
        ]
        d.append(AlgebraElement(algebra, blocks))
    return TraceRepresentation(algebra, tuple(d))


def _pauli_vector_start(phi: SchurMultiplier, algebra: TracialAlgebra) -> TraceRepresentation | None:
    """Real targets over a single M_2 block: d_i = v_i . (X, Y, Z) realizes
    any unital Gram of real unit vectors with rank <= 3 exactly."""
    if algebra.blocks != (2,) or not phi.real:
        return None
    m = phi.m.real
    w, vecs = np.linalg.eigh(0.5 * (m + m.T))
    w = np.clip(w, 0.0, None)
    order = np.argsort(w)[::-1][:3]
    fac = vecs[:, order] * np.sqrt(w[order])  # rows: vectors in R^<=3
    fac = np.pad(fac, ((0, 0), (0, 3 - fac.shape[1])))
    norms = np.linalg.norm(fac, axis=1)
    norms[norms < 1e-12] = 1.0
    fac = fac / norms[:, None]
    paulis = [
        np.array([[0, 1], [1, 0]], dtype=np.complex128),
        np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
        np.array([[1, 0], [0, -1]], dtype=np.complex128),
    ]
    d = []
    for i in range(phi.n):
        mat = sum(fac[i, r] * paulis[r] for r in range(3))
        d.append(AlgebraElement(algebra, [mat]))
    return TraceRepresentation(algebra, tuple(d))


def _polar(mat: np.ndarray) -> np.ndarray:
    if frobenius(mat) < 1e-12:
        return np.eye(mat.shape[0], dtype=np.complex128)
    u, _, vh = np.linalg.svd(mat)
    return u @ vh


def _polar_start(phi: SchurMultiplier, algebra: TracialAlgebra) -> TraceRepresentation | None:
    """Gram-factor rows unvectorized into the algebra and snapped to the
    nearest blockwise unitaries."""
    m = 0.5 * (phi.m + phi.m.conj().T)
    w, vecs = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    order = np.argsort(w)[::-1]
    fac = (vecs[:, order] * np.sqrt(w[order])).conj()  # row i: c_i
    dim = sum(b * b for b in algebra.blocks)
    if fac.shape[1] < dim:
        fac = np.pad(fac, ((0, 0), (0, dim - fac.shape[1])))
    fac = fac[:, :dim]
    d = []
    for i in range(phi.n):
        blocks = []
        off = 0
        for b, lam in zip(algebra.blocks, algebra.weights):
            seg = fac[i, off : off + b * b] / np.sqrt(lam)
            blocks.append(_polar(seg.reshape(b, b)))
            off += b * b
        d.append(AlgebraElement(algebra, blocks))
    return TraceRepresentation(algebra, tuple(d))


def warm_starts(phi: SchurMultiplier, algebra: TracialAlgebra) -> list[TraceRepresentation]:
    starts = []
    for cand in (
        _pauli_vector_start(phi, algebra),
        _fourier_start(phi.n, algebra),
        _polar_start(phi, algebra),
    ):
        if cand is not None:
            starts.append(gauge_normalize(cand))
    return starts


@dataclass(frozen=True)
class SearchResult:
    best_rep: TraceRepresentation
    residual: float
    converged: bool
    traces: tuple[tuple[float, ...], ...]
    message: str


def search(
    phi: SchurMultiplier,
    algebra: TracialAlgebra,
    restarts: int = 8,
    seed: int = 0,
    target_residual: float = 1e-8,
    max_iters: int = 150,
    eta0: float = 0.1,
) -> SearchResult:
    """Multi-restart Riemannian descent for a trace representation of phi.

    Structured warm starts (Pauli-vector for real targets, Fourier phases
    for scalar algebras, polar-snapped Gram factors) fill the first restart
    slots; the rest draw blockwise Haar unitaries from seeds spawned per
    restart, so traces are reproducible and prefix-stable in the restart
    count.  Raises TargetRejected when a necessary condition fails.
    """
    screen_target(phi)
    if restarts < 1:
        raise ValueError("need at least one restart")
    inits = warm_starts(phi, algebra)[:restarts]
    children = np.random.SeedSequence(seed).spawn(max(restarts - len(inits), 0))
    for child in children:
        rng = np.random.default_rng(child)
        inits.append(gauge_normalize(random_representation(phi.n, algebra, rng)))

    best_rep, best_res = None, np.inf
    traces = []
    for rep0 in inits:
        rep, res, trace = _optimize(phi, rep0, max_iters, eta0, target_residual)
        traces.append(tuple(trace))
        if res < best_res:
            best_rep, best_res = rep, res
    # repackaged residual must agree with the optimizer's own bookkeeping
    final = frobenius(build_multiplier(best_rep).m - phi.m)
    if abs(final - best_res) > 1e-12 + 1e-9 * final:
        raise AssertionError("residual bookkeeping mismatch")
    converged = final <= target_residual
    message = (
        "converged"
        if converged
        else (
            f"no representation found at this algebra size within the budget "
            f"(best residual {final:.3e}); this does not certify that none exists"
        )
    )
    return SearchResult(
        best_rep=best_rep,
        residual=final,
        converged=converged,
        traces=tuple(traces),
        message=message,
    )


BRUTE_COMBO_CAP = 3_000_000


def brute_oracle(
    phi: SchurMultiplier, algebra: TracialAlgebra, grid: int = 360
) -> tuple[TraceRepresentation, float]:
    """Exhaustive grid minimum over commutative (all-scalar) algebras.

    Every d_i (i >= 2) ranges over r-tuples of grid phases; d_1 is the
    unit.  Only feasible for tiny n and r; the combination count is capped.
    Returns (best rep, Frobenius residual).
    """
    screen_target(phi)
    if any(b != 1 for b in algebra.blocks):
        raise ValueError("brute_oracle only handles all-scalar algebras")
    n = phi.n
    r = len(algebra.blocks)
    combos = (grid**r) ** (n - 1)
    if combos > BRUTE_COMBO_CAP:
        raise ValueError(f"{combos} grid combinations exceed the cap {BRUTE_COMBO_CAP}")
    lam = np.asarray(algebra.weights)
    phases = np.exp(2j * np.pi * np.arange(grid) / grid)
    # all grid^r phase vectors, shape (P, r)
    vecs = np.stack(
        [np.array(t) for t in itertools.product(phases, repeat=r)]
    ) if r > 1 else phases[:, None]

    best_idx, best_val = None, np.inf
    target = phi.m
    for assign in itertools.product(range(len(vecs)), repeat=n - 1):
        z = np.vstack([np.ones((1, r), dtype=np.complex128), vecs[list(assign)]])
        model = (z.conj() * lam) @ z.T  # model[i, j] = sum_b lam_b conj(z_ib) z_jb
        val = frobenius(model - target)
        if val < best_val:
            best_idx, best_val = assign, val
    z = np.vstack([np.ones((1, r), dtype=np.complex128), vecs[list(best_idx)]])
    d = [
        AlgebraElement(algebra, [np.array([[z[i, b]]], dtype=np.complex128) for b in range(r)])
        for i in range(n)
    ]
    rep = TraceRepresentation(algebra, tuple(d))
    return rep, float(best_val)


def planted_instance(
    n: int, algebra: TracialAlgebra, seed: int
) -> tuple[TraceRepresentation, SchurMultiplier]:
    """A random blockwise-Haar representation and its symbol table."""
    rng = np.random.default_rng(seed)
    rep = random_representation(n, algebra, rng)
    return rep, build_multiplier(rep)

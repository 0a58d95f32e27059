"""Dense complex linear algebra primitives shared by every other module.

Matrices are plain ``numpy.ndarray`` objects with ``dtype=complex128``,
stored row-major.  Equality is always a Frobenius-norm comparison against a
tolerance except where an operation is structurally exact (transposes,
conjugation, entrywise products of exact inputs).
"""

from __future__ import annotations

import numpy as np

# Guard for kron blow-ups: refuse products whose entry count exceeds this.
KRON_ENTRY_CAP = 2**26

DEFAULT_TOL = 1e-10


def as_matrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a 2-D complex128 array, optionally checking the shape."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D array, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ValueError(f"expected {cols} cols, got {m.shape[1]}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def opnorm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(a), 2))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with an entry-count guard.

    The guard exists because downstream windows multiply dimensions
    K times; a silent 10^10-entry allocation is never what the caller wants.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    entries = a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1]
    if entries > KRON_ENTRY_CAP:
        raise ValueError(
            f"kron result would have {entries} entries, over the cap {KRON_ENTRY_CAP}"
        )
    return np.kron(a, b)


def kron_all(mats) -> np.ndarray:
    """Left-to-right Kronecker product of a sequence (empty product is [[1]])."""
    out = np.eye(1, dtype=np.complex128)
    for m in mats:
        out = kron(out, m)
    return out


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """E_ij in M_n: 1 at row i, column j."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def is_unitary(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"unitarity is only defined for square matrices, got {a.shape}")
    n = a.shape[0]
    eye = np.eye(n)
    return (
        frobenius(dagger(a) @ a - eye) <= tol
        and frobenius(a @ dagger(a) - eye) <= tol
    )


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def psd_check(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when the Hermitian matrix ``a`` has no eigenvalue below ``-tol``.

    Eigendecomposition is used instead of a Cholesky attempt because the
    interesting inputs sit exactly on the cone boundary (singular Grams),
    where pivoted factorizations are unreliable.

    Raises if ``a`` is not square or is further than ``tol`` from Hermitian
    in Frobenius norm.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"psd_check needs a square matrix, got shape {a.shape}")
    if frobenius(a - dagger(a)) > tol:
        raise ValueError("psd_check needs a Hermitian matrix (up to tol)")
    w = np.linalg.eigvalsh(hermitian_part(a))
    return bool(w.min(initial=0.0) >= -tol)


def psd_factor(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Return L with a ~= L @ L^dagger, clipping eigenvalues in [-tol, 0) to 0.

    Rows of L are Gram vectors: a[i, j] ~= <row_i, conj-pair row_j>, i.e.
    a = L L^dagger.  Eigenvalues below -tol raise.
    """
    a = np.asarray(a)
    w, v = np.linalg.eigh(hermitian_part(a))
    if w.min(initial=0.0) < -tol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    return v * np.sqrt(w)


def random_complex(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard complex Gaussian entries."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the standard phase fix."""
    z = random_complex(rng, n, n)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))

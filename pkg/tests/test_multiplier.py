import numpy as np
import pytest

from schurdil.linalg import dagger, matrix_unit, random_complex
from schurdil.multiplier import (
    CpResult,
    SchurMultiplier,
    cp_check,
    norm_bounds,
    pairing,
    rank1,
    schur_apply,
)

OMEGA_TABLE = np.array([[1, 1j], [-1j, 1]], dtype=complex)
FLIP = np.array([[0, 1], [1, 0]], dtype=complex)


def gram_entry(x, y):
    # <x, y> = sum_r x_r conj(y_r), linear in the first slot
    return np.sum(x * np.conj(y))


def random_unital_psd(rng, n):
    """Gram matrix of unit vectors: the generic admissible target."""
    g = random_complex(rng, n, n + 2)
    g = g / np.linalg.norm(g, axis=1)[:, None]
    return SchurMultiplier(g @ dagger(g))


def test_rank1_convention():
    got = rank1([1, 2], [3, 4])
    assert np.array_equal(got, np.array([[3, 6], [4, 8]], dtype=complex))


def test_schur_apply_entrywise():
    phi = SchurMultiplier(np.array([[1, 2], [3, 4]], dtype=complex))
    a = np.array([[5, 6], [7, 8]], dtype=complex)
    assert np.array_equal(schur_apply(phi, a), np.array([[5, 12], [21, 32]], dtype=complex))
    with pytest.raises(ValueError):
        schur_apply(phi, np.eye(3))


def test_schur_apply_composition():
    rng = np.random.default_rng(0)
    # exact on exact entries
    p1 = SchurMultiplier(np.array([[1, -1], [1j, 0]]))
    p2 = SchurMultiplier(np.array([[1, 1j], [-1j, 1]]))
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    lhs = schur_apply(p1, schur_apply(p2, a))
    rhs = schur_apply(SchurMultiplier(p1.m * p2.m), a)
    assert np.array_equal(lhs, rhs)
    # float associativity only up to roundoff on generic entries
    q1 = SchurMultiplier(random_complex(rng, 3, 3))
    q2 = SchurMultiplier(random_complex(rng, 3, 3))
    b = random_complex(rng, 3, 3)
    assert np.allclose(
        schur_apply(q1, schur_apply(q2, b)),
        schur_apply(SchurMultiplier(q1.m * q2.m), b),
        atol=1e-14,
    )


def test_power_is_entrywise():
    phi = SchurMultiplier(OMEGA_TABLE)
    assert np.allclose(phi.power(3).m, OMEGA_TABLE**3, atol=0)
    with pytest.raises(ValueError):
        phi.power(-1)


def test_flags():
    phi = SchurMultiplier(OMEGA_TABLE)
    assert phi.hermitian and phi.unital_diag and phi.psd and not phi.real
    flip = SchurMultiplier(FLIP)
    assert flip.hermitian and flip.real and not flip.psd and not flip.unital_diag
    # cached flags are stable across repeated reads
    assert phi.psd is phi.psd


def test_pairing_matches_trace_form():
    rng = np.random.default_rng(1)
    phi = SchurMultiplier(random_complex(rng, 3, 3))
    u, v, a, b = (random_complex(rng, 1, 3).ravel() for _ in range(4))
    got = pairing(phi, u, v, a, b)
    oracle = np.trace(schur_apply(phi, rank1(u, v)) @ rank1(a, b))
    assert got == pytest.approx(oracle, abs=1e-12)


def test_pairing_hand_value():
    phi = SchurMultiplier(OMEGA_TABLE)
    e1 = np.array([1.0, 0.0])
    assert pairing(phi, e1, e1, e1, e1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        pairing(phi, [1.0], e1, e1, e1)


def test_cp_check_boundary_gram_witness():
    res = cp_check(SchurMultiplier(OMEGA_TABLE))
    assert res.ok
    # rank-one table: a single Gram column suffices
    assert res.alpha.shape == (2, 1)
    for s in range(2):
        for t in range(2):
            assert gram_entry(res.alpha[t], res.alpha[s]) == pytest.approx(
                OMEGA_TABLE[s, t], abs=1e-8
            )


def test_cp_check_rejects_without_raising():
    res = cp_check(SchurMultiplier(FLIP))
    assert not res.ok and res.min_eigenvalue == pytest.approx(-1.0)
    res2 = cp_check(SchurMultiplier(np.array([[1, 1], [0, 1]], dtype=complex)))
    assert not res2.ok and "Hermitian" in res2.message


def test_cp_check_witness_on_random_grams():
    rng = np.random.default_rng(2)
    for _ in range(20):
        phi = random_unital_psd(rng, 4)
        res = cp_check(phi)
        assert res.ok
        recon = np.array(
            [[gram_entry(res.alpha[t], res.alpha[s]) for t in range(4)] for s in range(4)]
        )
        assert np.allclose(recon, phi.m, atol=1e-8)


def test_cp_positive_on_samples_and_amplification():
    rng = np.random.default_rng(3)
    phi = random_unital_psd(rng, 3)
    assert cp_check(phi).ok
    amp = SchurMultiplier(np.kron(phi.m, np.ones((2, 2))))
    for _ in range(25):
        g = random_complex(rng, 3, 3)
        out = schur_apply(phi, g @ dagger(g))
        assert np.linalg.eigvalsh(out).min() >= -1e-9
        g2 = random_complex(rng, 6, 6)
        out2 = schur_apply(amp, g2 @ dagger(g2))
        assert np.linalg.eigvalsh(out2).min() >= -1e-9


def test_norm_bounds_psd_unital_is_one():
    rng = np.random.default_rng(4)
    for phi in [SchurMultiplier(OMEGA_TABLE), random_unital_psd(rng, 3), random_unital_psd(rng, 4)]:
        nb = norm_bounds(phi)
        assert 1 - 1e-6 <= nb.lower <= nb.upper <= 1 + 1e-6
        assert nb.witness_residual(phi) <= 1e-8


def test_norm_bounds_zero_diagonal_flip():
    nb = norm_bounds(SchurMultiplier(FLIP))
    assert nb.lower == pytest.approx(1.0, abs=1e-6)
    assert nb.upper == pytest.approx(1.0, abs=1e-6)
    assert nb.witness_residual(SchurMultiplier(FLIP)) <= 1e-8
    # witness vectors stay inside the certified square norms
    assert (np.linalg.norm(nb.alpha, axis=1) ** 2).max() <= nb.upper + 1e-6
    assert (np.linalg.norm(nb.beta, axis=1) ** 2).max() <= nb.upper + 1e-6


def test_norm_bounds_bisection_path_allones():
    # spectral norm of J_2 is 2 but the multiplier norm is 1: the Dykstra
    # bisection must close the gap without the PSD shortcut
    phi = SchurMultiplier(np.ones((2, 2), dtype=complex))
    nb = norm_bounds(phi, use_gram_shortcut=False)
    assert nb.bisection_steps > 0
    assert nb.upper == pytest.approx(1.0, abs=1e-5)
    assert nb.lower == pytest.approx(1.0, abs=1e-9)
    assert nb.witness_residual(phi) <= 1e-6


def test_norm_bounds_bracket_on_random_tables():
    rng = np.random.default_rng(5)
    for _ in range(4):
        m = random_complex(rng, 3, 3)
        nb = norm_bounds(SchurMultiplier(m), tol=1e-4)
        assert nb.lower <= nb.upper + 1e-4
        assert nb.witness_residual(SchurMultiplier(m)) <= 1e-5
        # probe lower bounds are sound for every probe by construction;
        # spot-check against a fresh one
        a = random_complex(rng, 3, 3)
        ratio = np.linalg.norm(m * a, 2) / np.linalg.norm(a, 2)
        assert ratio <= nb.upper + 1e-4


def test_cp_agrees_with_eigenvalue_sign():
    rng = np.random.default_rng(6)
    for _ in range(200):
        h = random_complex(rng, 3, 3)
        h = 0.5 * (h + dagger(h))
        phi = SchurMultiplier(h)
        assert cp_check(phi).ok == (np.linalg.eigvalsh(h).min() >= -1e-10)

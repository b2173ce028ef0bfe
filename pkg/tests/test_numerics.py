import math

import mpmath
import numpy as np
import pytest

from cavity_bell.numerics import (
    NumericalFailure,
    as_complex_matrix,
    general_eigenvalues_4,
    hermitian_eigensystem,
    poisson_logweights,
    random_density_matrix,
    stable_poisson_logweight,
)


def test_as_complex_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_complex_matrix([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(ValueError):
        as_complex_matrix([[1.0, np.inf * 1j], [0.0, 1.0]])
    with pytest.raises(ValueError):
        as_complex_matrix(np.zeros(4))


def test_hermitian_identity():
    w, v = hermitian_eigensystem(np.eye(4))
    assert np.allclose(w, 1.0)
    assert np.allclose(v.conj().T @ v, np.eye(4))


def test_hermitian_diag_sorted():
    w, _ = hermitian_eigensystem(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1.0, 2.0, 3.0])


def test_hermitian_singlet_ttt():
    # the singlet's spin-correlation matrix is -I, so T^T T is the identity
    t = -np.eye(3)
    w, _ = hermitian_eigensystem(t.T @ t)
    assert np.allclose(w, [1.0, 1.0, 1.0], atol=1e-14)


def test_hermitian_reconstruction_contract(rng):
    for _ in range(20):
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        m = a + a.conj().T
        w, v = hermitian_eigensystem(m)
        recon = v @ np.diag(w) @ v.conj().T
        scale = np.abs(m).max()
        assert np.abs(m - recon).max() <= 1e-9 * scale
        assert np.abs(v.conj().T @ v - np.eye(6)).max() <= 1e-10


def test_hermitian_rejects_nonhermitian():
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="Hermitian"):
        hermitian_eigensystem(m)


def test_general_eigenvalues_diagonal():
    vals = general_eigenvalues_4(np.diag([4.0, -1.0, 2.5, 0.0]))
    assert np.allclose(sorted(vals.real), [-1.0, 0.0, 2.5, 4.0])
    assert np.abs(vals.imag).max() < 1e-14


def test_general_eigenvalues_nilpotent():
    shift = np.diag(np.ones(3), k=1)
    vals = general_eigenvalues_4(shift)
    assert np.abs(vals).max() < 1e-10


def test_general_eigenvalues_singlet_product():
    singlet = np.zeros(4, dtype=complex)
    singlet[1], singlet[2] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    rho = np.outer(singlet, singlet.conj())
    # rho~ equals rho for the singlet, so the product has spectrum (1, 0, 0, 0)
    vals = np.sort(general_eigenvalues_4(rho @ rho).real)[::-1]
    assert np.allclose(vals, [1.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_general_eigenvalues_residual_contract(rng):
    for _ in range(30):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        vals = general_eigenvalues_4(m)
        norm = np.abs(m).max()
        for lam in vals:
            res = abs(np.linalg.det(m - lam * np.eye(4)))
            assert res <= 1e-8 * norm ** 4


def test_eigen_routines_agree_on_hermitian(rng):
    for _ in range(50):
        rho = random_density_matrix(rng)
        w, _ = hermitian_eigensystem(rho)
        vals = np.sort(general_eigenvalues_4(rho).real)
        assert np.abs(w - vals).max() <= 1e-9


def test_psd_classification_consistent(rng):
    # same positivity verdicts from both eigenvalue routines on 1000 densities
    for _ in range(1000):
        rho = random_density_matrix(rng)
        w, _ = hermitian_eigensystem(rho)
        vals = general_eigenvalues_4(rho).real
        assert (w.min() >= -1e-9) == (vals.min() >= -1e-9)


def test_poisson_logweight_basics():
    assert math.isclose(stable_poisson_logweight(0, 1.0), -1.0, rel_tol=1e-14)
    with pytest.raises(ValueError):
        stable_poisson_logweight(0, 0.0)
    with pytest.raises(ValueError):
        stable_poisson_logweight(-1, 1.0)


def test_poisson_logweight_concentration_value():
    # n = gamma^2 = 150; reference from 60-digit arithmetic:
    # 150 log(150) - 150 - log(150!)
    mpmath.mp.dps = 60
    ref = float(150 * mpmath.log(150) - 150 - mpmath.log(mpmath.factorial(150)))
    got = stable_poisson_logweight(150, math.sqrt(150.0))
    assert abs(got - ref) < 1e-10
    assert abs(ref - (-3.42481173498532)) < 1e-12


@pytest.mark.parametrize("gamma2", [0.01, 1.0, 15.0, 150.0])
def test_poisson_weights_normalized(gamma2):
    gamma = math.sqrt(gamma2)
    n_max = int(gamma2 + 40 * math.sqrt(gamma2) + 60)
    total = np.exp(poisson_logweights(n_max, gamma)).sum()
    assert abs(total - 1.0) < 1e-12


def test_lgamma_against_log_recursion():
    # cumulative log-sum recursion as the independent reference, n <= 4096
    acc = 0.0
    checkpoints = {1, 2, 10, 100, 1000, 4096}
    for n in range(1, 4097):
        acc += math.log(n)
        if n in checkpoints:
            got = stable_poisson_logweight(n, 1.0)  # = -1 - log(n!)
            assert abs((got + 1.0 + acc) / max(acc, 1.0)) < 1e-12


def test_numerical_failure_is_runtime_error():
    assert issubclass(NumericalFailure, RuntimeError)

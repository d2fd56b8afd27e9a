import numpy as np
import pytest

from atom import generator
from errors import DegreeZero, InvalidParameter, NearDefective, NegativeTime, NonFinite
from matkernel import eig, eigvals, expm_action, polyroots


def test_eig_diagonal():
    system = eig(np.diag([1.0, 2.0j]))
    assert np.allclose(system.eigenvalues, [2.0j, 1.0])
    assert np.allclose(np.abs(system.eigenvectors), [[0.0, 1.0], [1.0, 0.0]])
    assert system.condition == pytest.approx(1.0)


def test_eig_two_level_generator():
    values = eigvals([[0.0, 2.5j], [2.5j, 0.5]])
    values = values[np.argsort(values.imag)]
    expected = np.sqrt(6.1875)
    assert values[0] == pytest.approx(0.25 - 1j * expected, abs=1e-12)
    assert values[1] == pytest.approx(0.25 + 1j * expected, abs=1e-12)


def test_eig_jordan_block_is_near_defective():
    with pytest.raises(NearDefective):
        eig([[0.0, 1.0], [0.0, 0.0]])


def test_eig_rejects_bad_input():
    with pytest.raises(NonFinite):
        eig([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(InvalidParameter):
        eig(np.ones((2, 3)))
    with pytest.raises(InvalidParameter):
        eig(np.eye(7))


def test_eig_residual_and_order_random():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        system = eig(a)
        norm = np.linalg.norm(a, 2)
        for k in range(4):
            residual = a @ system.eigenvectors[:, k] - system.eigenvalues[k] * system.eigenvectors[:, k]
            assert np.linalg.norm(residual) <= 1e-10 * norm
        assert np.all(np.diff(system.eigenvalues.real) >= 0)
        assert np.allclose(np.linalg.norm(system.eigenvectors, axis=0), 1.0)


def test_expm_action_identity_and_diagonal():
    v = np.array([0.3 + 1j, -2.0])
    assert np.allclose(expm_action(np.zeros((2, 2)), v, 5.0), v)
    assert np.allclose(expm_action(np.diag([1.0, 2.0]), [1.0, 1.0], 1.0), [np.exp(-1.0), np.exp(-2.0)], atol=1e-15)


def test_expm_action_matches_eigen_expansion(desk_params):
    m = generator(desk_params)
    system = eig(m)
    v = np.array([1.0, 0.5j, -0.25, 0.1])
    coefficients = np.linalg.solve(system.eigenvectors, v)
    t = 3.7
    expected = system.eigenvectors @ (np.exp(-system.eigenvalues * t) * coefficients)
    assert np.allclose(expm_action(m, v, t), expected, atol=1e-10)


def test_expm_action_semigroup(desk_params):
    m = generator(desk_params)
    v = np.array([1.0, 0.0, 0.0, 0.0])
    combined = expm_action(m, v, 4.0)
    stepped = expm_action(m, expm_action(m, v, 1.5), 2.5)
    assert np.allclose(combined, stepped, atol=1e-10)


def test_expm_action_negative_time():
    with pytest.raises(NegativeTime):
        expm_action(np.eye(2), [1.0, 0.0], -1e-3)


def test_polyroots_simple():
    assert np.allclose(polyroots([1.0, 0.0, -1.0]), [-1.0, 1.0])
    roots = polyroots([1.0, 0.0, 1.0])
    assert np.allclose(sorted(roots, key=lambda r: r.imag), [-1j, 1j])


def test_polyroots_sextic():
    coefficients = np.poly([1, 2, 3, 4, 5, 6])
    roots = polyroots(coefficients)
    assert np.allclose(roots.real, [1, 2, 3, 4, 5, 6], atol=1e-6)
    assert np.all(np.abs(roots.imag) < 1e-6)
    residual = np.sum(np.abs(np.polyval(coefficients, roots))) / np.linalg.norm(coefficients)
    assert residual <= 1e-8
    rebuilt = np.real(np.poly(roots)) * coefficients[0]
    assert np.allclose(rebuilt, coefficients, rtol=1e-6, atol=1e-6 * np.abs(coefficients).max())


def test_polyroots_errors():
    with pytest.raises(DegreeZero):
        polyroots([0.0, 0.0, 3.0])
    with pytest.raises(DegreeZero):
        polyroots([5.0])
    with pytest.raises(InvalidParameter):
        polyroots([0.0, 1.0, 1.0])
    with pytest.raises(InvalidParameter):
        polyroots(np.ones(10))

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgwigner.grid import make_grid
from kgwigner.kinematics import DELTA, NILPOTENT, TAU1, TAU3
from kgwigner.weyl import (
    MatrixSymbol,
    OperatorKernel,
    apply_kernel,
    classical_limit_bracket,
    compose,
    hamiltonian_symbol,
    kernel_to_symbol,
    moyal_bracket,
    poisson_bracket,
    sine_series_bracket,
    star_product,
    symbol_from_function,
    symbol_to_kernel,
)


def gauss(p0, q0, w=1.0):
    return lambda p, q: np.exp(-((p - p0) ** 2 + (q - q0) ** 2) / (2 * w))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([16, 32, 64]), st.integers(0, 2**31 - 1))
def test_symbol_kernel_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    g = make_grid(n, 5.0)
    vals = rng.normal(size=(2, 2, n, n)) + 1j * rng.normal(size=(2, 2, n, n))
    sym = MatrixSymbol(g, vals)
    back = kernel_to_symbol(symbol_to_kernel(sym))
    assert np.abs(back.values - vals).max() < 1e-12
    ker = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    again = symbol_to_kernel(kernel_to_symbol(OperatorKernel(g, ker)))
    assert np.abs(again.values - ker).max() < 1e-12


def test_real_symbol_gives_hermitian_kernel():
    # half-node values come from trigonometric interpolation in p, so the
    # symbol must be negligible at the momentum edge
    g = make_grid(96, 9.0)
    sym = symbol_from_function(g, lambda p, q: np.exp(-((p - 0.5) ** 2) / 2 - (q + 0.3) ** 2 / 8))
    assert symbol_to_kernel(sym).is_hermitian(atol=1e-12)


def test_kernel_of_momentum_function_is_diagonal():
    g = make_grid(64, 6.0)
    k = symbol_to_kernel(symbol_from_function(g, lambda p, q: np.cos(p) + 0 * q)).values
    off = k - np.diag(np.diag(k))
    assert np.abs(off).max() < 1e-12
    np.testing.assert_allclose(np.diag(k).real * g.dp, np.cos(g.p), atol=1e-12)


def test_star_product_matches_composition():
    g = make_grid(128, 8.0)
    a = symbol_from_function(g, gauss(0.3, 0.2), TAU3) + symbol_from_function(g, gauss(0, 0), DELTA)
    b = symbol_from_function(g, gauss(-0.4, 0.5, 1.5), TAU1)
    lhs = symbol_to_kernel(star_product(a, b)).values
    rhs = compose(symbol_to_kernel(a), symbol_to_kernel(b)).values
    assert np.abs(lhs - rhs).max() < 1e-10


def test_star_product_associative():
    g = make_grid(128, 8.0)
    a, b, c = (symbol_from_function(g, gauss(*x)) for x in [(0, 0), (0.5, -0.5), (-0.3, 0.7)])
    left = star_product(star_product(a, b), c).values
    right = star_product(a, star_product(b, c)).values
    assert np.abs(left - right).max() < 1e-10


def test_star_product_of_momentum_functions_is_pointwise():
    g = make_grid(64, 6.0)
    a = symbol_from_function(g, lambda p, q: np.exp(-(p**2)) + 0 * q)
    b = symbol_from_function(g, lambda p, q: np.cos(p) + 0 * q)
    assert np.abs(star_product(a, b).values - a.values * b.values).max() < 1e-12


@pytest.mark.parametrize("p0,q0", [(0.0, 0.0), (0.5, 0.5), (-0.5, -1.0)])
def test_moyal_bracket_of_p_and_q_acts_as_minus_one(p0, q0):
    # pointwise values of sampled linear symbols are periodic sawtooth artefacts;
    # the bracket is checked as an operator on states well inside the window
    g = make_grid(256, 10.0)
    p_sym = symbol_from_function(g, lambda p, q: p + 0 * q)
    q_sym = symbol_from_function(g, lambda p, q: q + 0 * p)
    k = symbol_to_kernel(moyal_bracket(p_sym, q_sym))
    psi = np.exp(-((g.p - p0) ** 2) / 2 - 1j * q0 * g.p)
    assert np.abs(apply_kernel(k, psi) + psi).max() < 1e-10


def test_p_star_q_expectation():
    # <p q> for a Gaussian equals the Wigner average of p q - i hbar / 2
    g = make_grid(256, 8.0)
    p_sym = symbol_from_function(g, lambda p, q: p + 0 * q)
    q_sym = symbol_from_function(g, lambda p, q: q + 0 * p)
    k = symbol_to_kernel(star_product(p_sym, q_sym))
    psi = np.exp(-((g.p - 0.5) ** 2) / 2 - 1j * 0.7 * g.p) / np.pi**0.25
    direct = np.vdot(psi, apply_kernel(k, psi)) * g.dp
    # <p q> = p0 q0 - i hbar / 2 for this minimum-uncertainty packet
    assert direct == pytest.approx(0.5 * 0.7 - 0.5j, abs=1e-10)


def test_poisson_bracket_sign_convention():
    g = make_grid(128, 8.0)
    a = symbol_from_function(g, lambda p, q: np.exp(-(q**2) / 2) + 0 * p)
    b = symbol_from_function(g, lambda p, q: np.exp(-(p**2) / 2) + 0 * q)
    q, p = g.q[None, :], g.p[:, None]
    # dA/dq dB/dp with A = A(q), B = B(p)
    expected = (-q * np.exp(-(q**2) / 2)) * (-p * np.exp(-(p**2) / 2))
    assert np.abs(poisson_bracket(a, b).values - expected).max() < 1e-10


_F, _G, _H = gauss(0, 0), gauss(0.5, -0.3), gauss(-0.3, 0.4, 0.75)


def _scaling_grid(hbar, n):
    return make_grid(n, 6.0, hbar=hbar)


@pytest.mark.slow
def test_noncommuting_regime_grows_like_inverse_hbar():
    sizes = []
    for hbar, n in [(0.25, 128), (0.125, 256), (0.0625, 512)]:
        g = _scaling_grid(hbar, n)
        a = symbol_from_function(g, _F, DELTA) + symbol_from_function(g, _G, TAU3)
        b = symbol_from_function(g, _H, TAU1)
        sizes.append(np.abs(moyal_bracket(a, b).values).max())
    ratios = [sizes[i + 1] / sizes[i] for i in range(2)]
    for r in ratios:
        assert r == pytest.approx(2.0, abs=0.1)


def test_commutator_of_order_hbar_converges():
    diffs = []
    for hbar, n in [(0.5, 128), (0.25, 256), (0.125, 512)]:
        g = _scaling_grid(hbar, n)
        a = symbol_from_function(g, _F, DELTA) + hbar * symbol_from_function(g, _G, TAU3)
        b = symbol_from_function(g, _H, TAU1)
        d = moyal_bracket(a, b).values - classical_limit_bracket(a, b).values
        diffs.append(np.abs(d).max())
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] < 0.01


def test_scalar_bracket_reduces_to_poisson_at_order_hbar_squared():
    diffs, sine = [], []
    for hbar, n in [(0.5, 128), (0.25, 256), (0.125, 512)]:
        g = _scaling_grid(hbar, n)
        a, b = symbol_from_function(g, _F), symbol_from_function(g, _H)
        m = moyal_bracket(a, b).values
        diffs.append(np.abs(m - poisson_bracket(a, b).values).max())
        sine.append(np.abs(m - sine_series_bracket(a, b, terms=3).values).max())
    for i in range(2):
        assert diffs[i] / diffs[i + 1] == pytest.approx(4.0, rel=0.2)
        # three sine-series terms leave an O(hbar^6) remainder
        assert np.log2(sine[i] / sine[i + 1]) == pytest.approx(6.0, abs=0.5)


def test_sine_series_rejects_matrix_symbols():
    g = make_grid(16, 2.0)
    a = symbol_from_function(g, _F, TAU1)
    with pytest.raises(ValueError):
        sine_series_bracket(a, a)


def test_hamiltonian_symbol_structure():
    g = make_grid(64, 6.0, mass=2.0, c=1.5)
    phi = 0.1 * np.exp(-(g.q**2))
    h = hamiltonian_symbol(g, phi=phi)
    kin = g.p[:, None] ** 2 / 4.0
    expected = NILPOTENT[:, :, None, None] * kin + TAU3[:, :, None, None] * 2.0 * 1.5**2
    expected = expected + DELTA[:, :, None, None] * phi[None, :]
    np.testing.assert_allclose(h.values, expected, atol=1e-14)
    # pseudo-Hermitian: tau3 H^dagger tau3 = H
    hd = np.conj(np.transpose(h.values, (1, 0, 2, 3)))
    np.testing.assert_allclose(np.einsum("ab,bcij,cd->adij", TAU3, hd, TAU3), h.values, atol=1e-14)
    with pytest.raises(ValueError):
        hamiltonian_symbol(g, phi=np.zeros(3))

import numpy as np
import pytest

from torus_olp import measure
from torus_olp.laurent import parse_poly


def test_haar_coefficients():
    h = measure.haar_oracle(3)
    c = h.coeffs([[0, 0, 0], [1, 0, 0], [0, -2, 1]])
    assert np.array_equal(c, [1, 0, 0])


def test_polynomial_weight_reads_off_coefficients():
    L = parse_poly("2*z1 + 0.5i*z2^-1 + 3")
    o = measure.polynomial_weight_oracle(measure.haar_oracle(2), L)
    assert o.coeff((1, 0)) == 2
    assert o.coeff((0, -1)) == 0.5j
    assert o.coeff((0, 0)) == 3
    assert o.coeff((1, 1)) == 0
    assert not o.is_real


def test_grid_matches_closed_form_coefficients():
    exact = measure.bernstein_szego_oracle(0.5)
    grid = measure.grid_oracle(exact.weight, 1, 128, is_real=True)
    n = np.arange(-10, 11).reshape(-1, 1)
    assert np.allclose(grid.coeffs(n), exact.coeffs(n), atol=1e-15)
    assert exact.coeff((3,)) == pytest.approx(0.125 / 0.75)


def test_grid_is_exact_for_trigonometric_polynomials():
    L = parse_poly("z1*z2^-1 + 0.25*z2^2 + 1")
    grid = measure.grid_oracle(L.on_torus, 2, 9)
    assert grid.coeff((1, -1)) == pytest.approx(1, abs=1e-15)
    assert grid.coeff((0, 2)) == pytest.approx(0.25, abs=1e-15)
    assert grid.coeff((1, 1)) == pytest.approx(0, abs=1e-15)


def test_grid_band_is_enforced():
    grid = measure.grid_oracle(lambda th: np.ones(th.shape[:-1]), 1, 9)
    assert grid.band == 4
    with pytest.raises(measure.BandError):
        grid.coeff((5,))


def test_grid_default_size():
    assert measure.default_grid_size(4) == 25


def test_deformed_discrete_matches_convolution():
    base = measure.haar_oracle(2)
    L = parse_poly("z1 + 0.3*z2^-1 - 2")
    d = measure.deformed_oracle(base, None, [(L, 2)])
    direct = measure.polynomial_weight_oracle(base, L * L)
    alphas = [[a, b] for a in range(-2, 3) for b in range(-2, 3)]
    assert np.allclose(d.coeffs(alphas), direct.coeffs(alphas))


def test_deformed_continuous_weight():
    base = measure.haar_oracle(1)
    d = measure.deformed_oracle(base, {(1,): 0.3, (-1,): 0.3}, M=64)
    # exp(0.6 cos theta): c_0 = I_0(0.6)
    assert d.coeff((0,)).real == pytest.approx(1.0920453, abs=1e-7)
    assert d.is_real


def test_oracle_from_json_variants():
    L = parse_poly("z1 + z1^-1 + 3")
    o = measure.oracle_from_json({"laurent": L.to_json()})
    assert o.coeff((1,)) == 1
    t = measure.oracle_from_json({"exp_times": [{"alpha": [1, 0], "re": 0.1}], "grid": 33})
    assert t.D == 2 and t.M == 33
    h = measure.oracle_from_json('{"haar": true, "D": 3}')
    assert isinstance(h, measure.HaarOracle) and h.D == 3
    with pytest.raises(ValueError):
        measure.oracle_from_json({"nothing": 1})


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        measure.polynomial_weight_oracle(measure.haar_oracle(1), parse_poly("z1 + z2"))

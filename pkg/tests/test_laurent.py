import numpy as np
import pytest

from torus_olp.laurent import LaurentPolynomial, is_nice, multiply, nicety_oracle, parse_poly, sign_pattern


def test_arithmetic_and_evaluation():
    L = parse_poly("z1 + 2*z2^-1 + 3")
    M = parse_poly("z1^-1 - z2")
    z = np.array([0.8 + 0.3j, -1.1j])
    assert (L * M).evaluate(z) == pytest.approx(L.evaluate(z) * M.evaluate(z))
    assert (L + M).evaluate(z) == pytest.approx(L.evaluate(z) + M.evaluate(z))
    assert (L - L).is_zero()
    assert (L**3).evaluate(z) == pytest.approx(L.evaluate(z) ** 3)


def test_square_of_worked_weight(worked_weight):
    sq = multiply(worked_weight, worked_weight)
    assert sq.coeff((0, 0)) == pytest.approx(29)
    assert len(sq.terms) == 13
    assert sq.longitude() == 2


def test_adjoint_is_conjugate_on_torus(rng):
    L = parse_poly("(1)*z1 + 0.5i*z1*z2^-1 + 2")
    theta = rng.uniform(0, 2 * np.pi, size=(6, 2))
    assert np.allclose(L.adjoint().on_torus(theta), np.conj(L.on_torus(theta)))
    assert not L.is_torus_real()
    assert (L + L.adjoint()).is_torus_real(1e-14)


def test_parse_complex_and_signs():
    L = parse_poly("-z1^-2 + 0.5i*z2 + 2.5")
    assert L.coeff((-2, 0)) == -1
    assert L.coeff((0, 1)) == 0.5j
    assert L.coeff((0, 0)) == 2.5


def test_json_round_trip():
    L = parse_poly("z1^-1 + 0.3i*z2^2 + 4")
    assert LaurentPolynomial.from_json(L.to_json()).close_to(L)


@pytest.mark.parametrize(
    "text,nice",
    [
        ("z1^-2 + z1^2 + z2", True),
        ("z1^-2 + z2^-2 + 1", False),
        ("z1^-2 + z1*z2^-1 + z1*z2", True),
        ("z1 + z1^-1 + z2 + z2^-1 + 5", True),
    ],
)
def test_worked_nicety_examples(text, nice):
    L = parse_poly(text)
    assert is_nice(L).nice is nice
    assert nicety_oracle(L) is nice


def test_deficient_orthant_is_reported():
    report = is_nice(parse_poly("z1^-2 + z2^-2 + 1"))
    assert report.deficient_orthants == [()]
    assert report.to_json()["deficient_signs"] == ["++"]
    assert sign_pattern((2,), 3) == "+-+"


def test_nice_means_longitude_is_additive(rng):
    nice = parse_poly("z1^-2 + z1*z2^-1 + z1*z2")
    for _ in range(20):
        terms = {tuple(rng.integers(-3, 4, size=2)): 1.0 for _ in range(3)}
        M = LaurentPolynomial(2, terms)
        assert multiply(nice, M).longitude() == nice.longitude() + M.longitude()


def test_random_supports_agree(rng):
    for _ in range(100):
        D = int(rng.integers(1, 4))
        terms = {tuple(int(x) for x in rng.integers(-3, 4, size=D)): 1.0 + rng.normal() for _ in range(int(rng.integers(1, 6)))}
        L = LaurentPolynomial(D, terms)
        assert is_nice(L).nice == nicety_oracle(L)

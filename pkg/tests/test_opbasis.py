import numpy as np
import pytest

from conftest import torus_points
from torus_olp import opbasis
from torus_olp.longilex import chi_eval

FAMILIES = ["worked_fact", "skew_fact"]


def test_haar_polynomials_are_monomials(haar_fact_d2, rng):
    _, f = haar_fact_d2
    z = torus_points(rng, 2, 3)
    assert np.allclose(opbasis.eval_all(f, z), chi_eval(f.basis, z))


@pytest.mark.parametrize("name", FAMILIES)
def test_monic_and_biorthogonal(name, request):
    G, f = request.getfixturevalue(name)
    assert opbasis.biorthogonality_residual(f, G) < 1e-13
    b = f.basis
    for k in range(f.levels):
        assert np.array_equal(f.S[b.block(k), b.block(k)], np.eye(b.shell_len(k)))


@pytest.mark.parametrize("name", FAMILIES)
def test_quasideterminant_polynomials(name, request, rng):
    G, f = request.getfixturevalue(name)
    z = torus_points(rng, 2, 1)[0]
    for k in range(1, f.levels):
        assert np.abs(opbasis.phi_via_qd(G, k, z) - opbasis.eval_family(f, k, z)).max() < 1e-12


@pytest.mark.parametrize("name", FAMILIES)
def test_kernel_equals_inverse_truncation(name, request, rng):
    G, f = request.getfixturevalue(name)
    z1, z2 = torus_points(rng, 2, 2)
    for k in range(1, f.levels + 1):
        assert opbasis.abc_check(f, G, k, z1, z2) < 1e-13


@pytest.mark.parametrize("name", FAMILIES)
def test_cd_formula(name, request, rng):
    _, f = request.getfixturevalue(name)
    n = rng.normal(size=4) + 1j * rng.normal(size=4)
    z1, z2 = torus_points(rng, 2, 2)
    for k in range(1, f.levels):
        assert opbasis.cd_formula(f, n, k, z1, z2) == pytest.approx(opbasis.cd_kernel(f, k, z1, z2), abs=1e-12)


@pytest.mark.parametrize("name", FAMILIES)
@pytest.mark.parametrize("hat", [False, True])
def test_three_term_relation(name, hat, request, rng):
    _, f = request.getfixturevalue(name)
    n = rng.normal(size=4) + 1j * rng.normal(size=4)
    z = torus_points(rng, 2, 1)[0]
    for k in range(f.levels - 1):
        assert opbasis.three_term_residual(f, n, k, z, hat) < 1e-12


@pytest.mark.parametrize("name", FAMILIES)
def test_reversal_symmetry(name, request, rng):
    _, f = request.getfixturevalue(name)
    assert opbasis.reversal_symmetry_check(f, torus_points(rng, 2, 1)[0]) < 1e-13


def test_kernel_hermitian_symmetry(worked_fact, rng):
    _, f = worked_fact
    z1, z2 = torus_points(rng, 2, 2)
    assert opbasis.kernel_symmetry_check(f, 3, z1, z2) < 1e-13


def test_reproducing_property(worked_fact, worked_oracle, rng):
    _, f = worked_fact
    z1, z2 = torus_points(rng, 2, 2)
    assert opbasis.reproducing_check(f, worked_oracle, 3, z1, z2) < 1e-12


@pytest.mark.parametrize("name", FAMILIES)
def test_second_kind_functions(name, request, rng):
    G, f = request.getfixturevalue(name)
    oracle = G.oracle
    z = torus_points(rng, 2, 1)[0]
    for k in range(f.basis.K - oracle.laurent_weight.longitude() + 1):
        assert opbasis.second_kind_check(f, G, oracle, k, z) < 1e-12


def test_second_kind_needs_laurent_weight(worked_fact):
    G, f = worked_fact
    with pytest.raises(ValueError):
        opbasis.second_kind_check(f, G, G.oracle, f.basis.K, np.array([1.0, 1.0]))


def test_expansion_round_trip(skew_fact, rng):
    G, f = skew_fact
    coeffs = np.zeros(f.basis.size, dtype=complex)
    coeffs[: f.basis.N(2)] = rng.normal(size=f.basis.N(2))
    a = opbasis.expansion_coefficients(f, G, coeffs)
    assert np.allclose(opbasis.synthesize(f, a), coeffs)
    assert np.allclose(a[f.basis.N(2):], 0)


def test_basis_determinant_is_one(skew_fact):
    _, f = skew_fact
    assert opbasis.basis_determinant(f, 2) == pytest.approx(1)


def test_zero_coordinates_rejected(worked_fact):
    _, f = worked_fact
    with pytest.raises(ValueError):
        opbasis.eval_all(f, np.array([0.0, 1.0]))

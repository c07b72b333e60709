import numpy as np
import pytest

from conftest import torus_points
from torus_olp import darboux, gaussborel, longilex, measure, moments, opbasis
from torus_olp.laurent import parse_poly

# Coefficients of the transformed shell [1] over (1, z1^-1, z2^-1, z2, z1).
WORKED_T_PHI_1 = np.array(
    [
        [-0.2, 1, 0, 0, 0],
        [-0.2, 0, 1, 0, 0],
        [-0.2, 0, 0, 1, 0],
        [-0.2, 0, 0, 0, 1],
    ]
)


@pytest.fixture(scope="module")
def setting(worked_weight):
    base = measure.haar_oracle(2)
    basis = longilex.LongilexBasis(2, 4)
    f = gaussborel.factorize(moments.build_moment(base, basis))
    tf = darboux.perturbed_factorization(base, worked_weight, basis)
    return worked_weight, base, f, tf


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_worked_example_coefficients(setting, seed):
    L, _, f, _ = setting
    nodes = darboux.sample_nodes(L, f, 1, seed=seed)
    assert len(nodes) == 4
    assert darboux.zero_set_residual(L, nodes.points) < 1e-12
    coeffs, remainder = darboux.christoffel_coefficients(f, L, nodes, 1)
    assert np.abs(coeffs - WORKED_T_PHI_1).max() < 1e-10
    assert remainder < 1e-12


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_formula_matches_direct_route(setting, k, rng):
    L, _, f, tf = setting
    nodes = darboux.sample_nodes(L, f, k, seed=k)
    for z in torus_points(rng, 2, 5, off=False):
        direct = opbasis.eval_family(tf, k, z)
        assert np.abs(darboux.christoffel_transform(f, L, nodes, k, z) - direct).max() < 1e-10


@pytest.mark.parametrize("k", [1, 2, 3])
def test_transformed_quasitau_and_beta(setting, k):
    L, _, f, tf = setting
    nodes = darboux.sample_nodes(L, f, k, seed=7)
    assert np.abs(darboux.transformed_quasitau(f, L, nodes, k) - tf.H_block(k)).max() < 1e-10
    tbeta, rank = darboux.transformed_beta(f, L, nodes, k)
    assert rank == f.basis.shell_len(k - 1)
    assert np.abs(tbeta - tf.beta(k)).max() < 1e-10


def test_resolvent_band_structure(setting, rng):
    L, _, f, tf = setting
    res = darboux.resolvent(f, tf, L)
    b, m = f.basis, L.longitude()
    assert darboux.block_band_residual(res.omega, b, 0, m, rows_upto=b.K - m) < 1e-12
    assert darboux.block_band_residual(res.M, b, m, 0) < 1e-12
    r = darboux.intertwining_residuals(f, tf, L, res, torus_points(rng, 2, 1)[0])
    assert r["omega"] < 1e-12 and r["M"] < 1e-12


def test_jacobi_factorization(setting):
    L, _, f, tf = setting
    omega = darboux.node_resolvent(f, L, seed=3)
    r = darboux.jacobi_lu_residual(f, tf, L, omega)
    assert r["LJ"] < 1e-9 and r["LTJ"] < 1e-9
    TH = [tf.H_block(k) for k in range(4)]
    for k in range(1, 5):
        assert darboux.jacobi_determinant_residual(f, L, TH, k) < 1e-10


@pytest.mark.parametrize("variant", [1, 2, 3, 4])
def test_kernel_connection(setting, variant, rng):
    L, _, f, tf = setting
    z1, z2 = torus_points(rng, 2, 2)
    for l in (1, 2):
        assert darboux.kernel_connection_check(f, tf, L, z1, z2, l, variant) < 1e-12


def test_vandermonde_rank(setting):
    L, _, f, _ = setting
    nodes = darboux.sample_nodes(L, f, 1, seed=0)
    rep = darboux.vandermonde_rank(L, f.basis, nodes, 1)
    assert rep["full_column_rank"] and rep["rows"] == 5 and rep["left_null_dim"] == 1


def test_longitude_two_polynomial():
    L = parse_poly("z1^2 + z1^-2 + z2^2 + z2^-2 + z1*z2^-1 + z1^-1*z2 + 8")
    base = measure.haar_oracle(2)
    basis = longilex.LongilexBasis(2, 4)
    f = gaussborel.factorize(moments.build_moment(base, basis))
    tf = darboux.perturbed_factorization(base, L, basis)
    z = np.exp(1j * np.array([0.3, 2.0]))
    for k in (1, 2):
        nodes = darboux.sample_nodes(L, f, k, seed=k)
        assert np.abs(darboux.christoffel_transform(f, L, nodes, k, z) - opbasis.eval_family(tf, k, z)).max() < 1e-9


def test_one_variable_uses_roots():
    L = parse_poly("z1 + z1^-1 + 3")
    base = measure.haar_oracle(1)
    basis = longilex.LongilexBasis(1, 3)
    f = gaussborel.factorize(moments.build_moment(base, basis))
    tf = darboux.perturbed_factorization(base, L, basis)
    nodes = darboux.sample_nodes(L, f, 1)
    assert nodes.meta["method"] == "roots"
    z = np.array([np.exp(0.9j)])
    assert np.allclose(darboux.christoffel_transform(f, L, nodes, 1, z), opbasis.eval_family(tf, 1, z))


def test_supplied_nodes_are_validated(setting):
    L, _, f, _ = setting
    good = darboux.sample_nodes(L, f, 1, seed=0)
    again = darboux.validate_nodes(L, f, darboux.NodeSet.from_json(good.to_json()), 1)
    assert np.allclose(again.points, good.points)
    with pytest.raises(darboux.PoisednessFailure):
        darboux.validate_nodes(L, f, good.points[:3], 1)
    with pytest.raises(ValueError):
        darboux.validate_nodes(L, f, good.points + 0.1, 1)
    repeated = np.repeat(good.points[:1], 4, axis=0)
    with pytest.raises(darboux.PoisednessFailure):
        darboux.validate_nodes(L, f, repeated, 1)


def test_non_nice_polynomial_is_refused():
    with pytest.raises(ValueError):
        darboux.nicety_guard(parse_poly("z1^-2 + z2^-2 + 1"))


def test_section_too_short(setting):
    L, _, f, _ = setting
    with pytest.raises(ValueError):
        darboux.sample_nodes(L, f, f.basis.K, seed=0)

import numpy as np
import pytest

from torus_olp import longilex, measure, toda
from torus_olp.acceptance import preset_oracle


@pytest.fixture(scope="module")
def flow():
    base = preset_oracle("worked-example", 2)
    times = {(1, 0): 0.15, (-1, 0): 0.15, (0, 1): 0.1 + 0.05j, (0, -1): 0.1 - 0.05j}
    return toda.ContinuousFlow(base, longilex.LongilexBasis(2, 3), times, M=48)


@pytest.fixture(scope="module")
def lattice():
    base = preset_oracle("worked-example", 2)
    N = np.array([[0.3, 0.0, 0.2, 0.1], [0.1, 0.4, 0.0, 0.2j]])
    return toda.DiscreteLattice(base, longilex.LongilexBasis(2, 4), toda.DegreeOneFlow(N, [-2.0, 1.5 + 0.5j]))


def test_axis_shift():
    assert toda.axis_shift(3, -2) == (0, -1, 0)
    with pytest.raises(ValueError):
        toda.axis_shift(2, 3)


@pytest.mark.parametrize("a", [1, -1, 2, -2])
def test_first_order_laws(flow, a):
    for k in range(flow.basis.K):
        for v in toda.first_order_residuals(flow, a, k).values():
            assert v < 1e-7


@pytest.mark.parametrize("a,b", [(1, 2), (2, -1), (-1, -2)])
def test_second_order_toda(flow, a, b):
    for k in (1, 2):
        assert toda.toda_equation_residual(flow, a, b, k) < 1e-5


def test_second_order_converges_quadratically(flow):
    _, _, order = toda.richardson_order(lambda h: toda.toda_equation_residual(flow, 1, 2, 1, h), 4e-2)
    assert 1.6 <= order <= 2.4


def test_lax_zero_curvature_gelfand_dickey(flow):
    assert toda.lax_residual(flow, (1, 0), (0, 1)) < 1e-5
    assert toda.zero_curvature_residual(flow, (-1, 0), (0, 1)) < 1e-5
    assert toda.gelfand_dickey_residual(flow, (0, 1)) < 1e-6


def test_wave_factorization(flow):
    assert toda.wave_factorization_residual(flow) < 1e-11


def test_block_split_recombines(flow):
    J = np.arange(flow.basis.size**2, dtype=float).reshape(flow.basis.size, -1)
    assert np.array_equal(toda.block_split(J, flow.basis, "<") + toda.block_split(J, flow.basis, ">="), J)


def test_discrete_step(lattice):
    out = toda.discrete_step(lattice.base, lattice.basis, lattice.flow, 0)
    assert out["alpha_residual"] < 1e-12 and out["rho_residual"] < 1e-12


def test_discrete_compatibility_and_toda(lattice):
    assert toda.zs_compatibility_residual(lattice, 0, 1) < 1e-10
    for k in range(1, lattice.basis.K):
        assert toda.discrete_toda_residual(lattice, 0, 1, k) < 1e-9


@pytest.mark.parametrize("k", [1, 2, 3])
def test_miwa_expression(k):
    base = preset_oracle("worked-example", 2)
    z = np.array([0.9 * np.exp(0.7j), 1.1 * np.exp(-1.3j)])
    assert toda.miwa_residual(base, longilex.LongilexBasis(2, 4), np.eye(4), z, k) < 1e-8


@pytest.mark.parametrize("D", [1, 2, 3])
def test_stacked_shifts_have_full_rank(D):
    basis = longilex.LongilexBasis(D, 4)
    for k in range(basis.K - 1):
        assert toda.fullrank_report(basis, k)["full_column_rank"]


def test_left_inverse_rejects_wide():
    with pytest.raises(np.linalg.LinAlgError):
        toda.left_inverse(np.ones((2, 3)))


def test_positivity_margin():
    assert np.allclose(toda.positivity_margin([[0.5, 0, 0, 0.5]], [-2.0]), [-1.0])


def test_haar_flow_stays_haar_at_zero():
    f = toda.ContinuousFlow(measure.haar_oracle(1), longilex.LongilexBasis(1, 2)).at()
    assert np.allclose(f.H, np.eye(5))

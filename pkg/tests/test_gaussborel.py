import numpy as np
import pytest

from torus_olp import gaussborel, longilex, measure, moments
from torus_olp.moments import MomentMatrix


@pytest.mark.parametrize("name", ["worked_fact", "skew_fact"])
def test_reconstruction_and_triangularity(name, request):
    G, f = request.getfixturevalue(name)
    b = G.basis
    assert np.abs(f.reconstruct() - G.data).max() < 1e-13
    for M in (f.S, f.Shat):
        assert np.allclose(np.diag(M), 1)
        for k in range(b.K + 1):
            blk = M[b.block(k), b.block(k)]
            assert np.array_equal(blk, np.eye(b.shell_len(k)))
            assert np.all(M[b.block(k), b.offsets[k + 1]:] == 0)


def test_haar_factors_are_identity(haar_fact_d2):
    G, f = haar_fact_d2
    n = G.basis.size
    for M in (f.S, f.Shat, f.H):
        assert np.abs(M - np.eye(n)).max() == 0


def test_hermitian_measure_gives_equal_families(worked_fact):
    _, f = worked_fact
    assert np.abs(f.S - f.Shat).max() < 1e-13
    assert np.abs(f.H - f.H.conj().T).max() < 1e-13


@pytest.mark.parametrize("name", ["worked_fact", "skew_fact"])
def test_quasideterminants(name, request):
    G, f = request.getfixturevalue(name)
    for k in range(f.levels):
        assert np.abs(gaussborel.quasi_tau_via_qd(G, k) - f.H_block(k)).max() < 1e-12
    for k in range(1, f.levels):
        beta, beta_hat = gaussborel.subdiag_via_qd(G, k)
        assert np.abs(beta - f.beta(k)).max() < 1e-12
        assert np.abs(beta_hat - f.beta_hat(k)).max() < 1e-12


def test_determinant_identity(skew_fact):
    G, f = skew_fact
    assert gaussborel.determinant_identity_residual(G, f) < 1e-12


def test_worked_first_blocks(worked_fact):
    _, f = worked_fact
    assert f.H_block(0)[0, 0] == pytest.approx(5)
    # H_1 = 5 I - (1/5) ones on the shell [1]
    assert np.allclose(f.H_block(1), 5 * np.eye(4) - 0.2 * np.ones((4, 4)))


def test_last_quasi_determinant_rectangular():
    M = np.arange(12.0).reshape(3, 4) + np.eye(3, 4) * 5
    out = gaussborel.last_quasi_determinant(M, (1, 2))
    A, B, C, D = M[:2, :2], M[:2, 2:], M[2:, :2], M[2:, 2:]
    assert np.allclose(out, D - C @ np.linalg.solve(A, B))
    with pytest.raises(ValueError):
        gaussborel.last_quasi_determinant(M, (2, 2))


def test_singular_pivot_is_reported():
    b = longilex.LongilexBasis(1, 2)
    data = np.eye(b.size, dtype=complex)
    data[1:3, 1:3] = [[1, 1], [1, 1]]
    with pytest.raises(gaussborel.SingularBlock) as info:
        gaussborel.factorize(MomentMatrix(data, b))
    assert info.value.k == 1


def test_requires_moment_matrix():
    with pytest.raises(TypeError):
        gaussborel.factorize(np.eye(3))


def test_json_shape(worked_fact):
    _, f = worked_fact
    data = f.to_json()
    assert data["levels"] == 4 and len(data["beta"]) == 3
    assert "S" in f.to_json(full=True)


def test_inverse_cache(skew_fact):
    _, f = skew_fact
    assert np.allclose(f.inverse("S") @ f.S, np.eye(f.basis.size))
    assert np.allclose(f.inverse("Shat") @ f.Shat, np.eye(f.basis.size))
    assert np.allclose(f.inverse("H") @ f.H, np.eye(f.basis.size))

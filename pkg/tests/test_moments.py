import json

import numpy as np
import pytest

from torus_olp import measure, moments


def test_entries_follow_difference_rule(skew_oracle):
    G = moments.moment_matrix(skew_oracle, 3)
    E = G.basis.indices
    for i in (0, 3, 7):
        for j in (1, 4, 12):
            diff = tuple(b - a for a, b in zip(E[i], E[j]))
            assert G.data[i, j] == skew_oracle.coeff(diff)


def test_haar_is_identity():
    G = moments.moment_matrix(measure.haar_oracle(3), 3)
    assert np.array_equal(G.data, np.eye(G.basis.size))


def test_hermitian_for_real_measure(worked_oracle, skew_oracle):
    assert moments.hermitian_residual(moments.moment_matrix(worked_oracle, 4)) == 0
    assert moments.hermitian_residual(moments.moment_matrix(skew_oracle, 4)) > 0.1


@pytest.mark.parametrize("level", [2, 3, 4])
def test_persymmetry(skew_oracle, level):
    assert moments.persymmetry_residual(moments.moment_matrix(skew_oracle, level)) == 0


def test_string_equations(skew_oracle):
    G = moments.moment_matrix(skew_oracle, 4)
    for alpha in ([1, 0], [0, -1], [1, 1]):
        assert moments.check_string_equation(G, alpha) < 1e-14


def test_truncations_and_bordered_shapes(worked_oracle):
    G = moments.moment_matrix(worked_oracle, 4)
    assert G.truncation(2).shape == (5, 5)
    assert moments.bordered_row_truncation(G, 2, 3).shape == (1 + 12, 5)
    assert moments.bordered_col_truncation(G, 2, 3).shape == (5, 1 + 12)
    with pytest.raises(IndexError):
        moments.bordered_row_truncation(G, 3, 2)
    with pytest.raises(IndexError):
        G.truncation(9)


def test_serialization(worked_oracle):
    G = moments.moment_matrix(worked_oracle, 2)
    data = json.loads(moments.dumps(G))
    assert data["level"] == 2 and np.allclose(data["re"], G.data.real)
    lines = G.to_csv().splitlines()
    assert lines[0] == "i,j,shell_i,shell_j,re,im"
    assert lines[1] == "0,0,0,0,5,0"


def test_leading_minor_report_positive(worked_oracle):
    rep = moments.leading_minor_report(moments.moment_matrix(worked_oracle, 3))
    assert all(r["min_eig"] > 0 for r in rep)


def test_level_must_be_positive(worked_oracle):
    with pytest.raises(ValueError):
        moments.moment_matrix(worked_oracle, 0)

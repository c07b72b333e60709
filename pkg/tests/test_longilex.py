import itertools

import numpy as np
import pytest

from torus_olp.longilex import LongilexBasis, chi_eval, enumerate_shell, longitude, monomials, shell_size

# Frozen cardinalities |[k]| for D = 1..4, k = 0..5.
SHELL_SIZES = {
    1: [1, 2, 2, 2, 2, 2],
    2: [1, 4, 8, 12, 16, 20],
    3: [1, 6, 18, 38, 66, 102],
    4: [1, 8, 32, 88, 192, 360],
}


@pytest.mark.parametrize("D", sorted(SHELL_SIZES))
def test_shell_size_table(D):
    assert [shell_size(D, k) for k in range(6)] == SHELL_SIZES[D]


@pytest.mark.parametrize("D,k", [(D, k) for D in range(1, 4) for k in range(6)])
def test_enumeration_matches_brute_force(D, k):
    brute = sorted(a for a in itertools.product(range(-k, k + 1), repeat=D) if sum(map(abs, a)) == k)
    assert list(enumerate_shell(D, k)) == brute


def test_two_variable_display_order():
    assert enumerate_shell(2, 1) == ((-1, 0), (0, -1), (0, 1), (1, 0))
    assert enumerate_shell(2, 2) == ((-2, 0), (-1, -1), (-1, 1), (0, -2), (0, 2), (1, -1), (1, 1), (2, 0))


def test_one_variable_order_alternates():
    b = LongilexBasis(1, 4)
    assert [a[0] for a in b.indices] == [0, -1, 1, -2, 2, -3, 3, -4, 4]


def test_basis_offsets_and_blocks():
    b = LongilexBasis(2, 3)
    assert b.size == 1 + 4 + 8 + 12
    assert b.N(-1) == 0 and b.N(0) == 1 and b.N(1) == 5 and b.N(3) == 25
    assert b.block(2) == slice(5, 13)
    assert b.upto(2) == slice(0, 5)
    assert b.position((1, -1)) == (2, 5)
    assert b.shell_of[b.index_of[(0, 2)]] == 2


def test_json_round_trip():
    b = LongilexBasis(3, 2)
    c = LongilexBasis.from_json(b.to_json())
    assert c.indices == b.indices


def test_json_rejects_wrong_order():
    data = LongilexBasis(2, 1).to_json()
    data["shells"][1] = data["shells"][1][::-1]
    with pytest.raises(ValueError):
        LongilexBasis.from_json(data)


def test_chi_values_and_batching(rng):
    b = LongilexBasis(2, 2)
    z = np.array([0.7 + 0.2j, 1.3j])
    chi = chi_eval(b, z)
    for i, a in enumerate(b.indices):
        assert chi[i] == pytest.approx(z[0] ** a[0] * z[1] ** a[1])
    zs = rng.normal(size=(3, 2)) + 1j
    assert chi_eval(b, zs).shape == (3, b.size)
    assert np.allclose(monomials(b.exponents, zs[1]), chi_eval(b, zs[1]))


def test_invalid_arguments():
    with pytest.raises(ValueError):
        shell_size(0, 1)
    with pytest.raises(ValueError):
        LongilexBasis(2, -1)
    assert longitude((-2, 3, 0)) == 5

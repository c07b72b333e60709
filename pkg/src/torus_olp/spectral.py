"""Shift and reversal matrices on a longilex basis, Jacobi matrices, orthants.

Every matrix here is a finite section of a semi-infinite object.  Entries are
defined directly from the index pattern, so a finite section is exact; products
of sections only agree with the semi-infinite product on interior rows, i.e.
rows in shells ``0..K - margin`` where ``margin`` is the shell bandwidth.
"""

from __future__ import annotations

import itertools

import numpy as np
import scipy.sparse as sp

from .laurent import LaurentPolynomial
from .longilex import LongilexBasis, enumerate_shell, longitude, monomials


def interior(basis: LongilexBasis, margin: int) -> slice:
    """Indices of the shells ``0..K - margin`` (empty if ``margin > K``)."""
    top = basis.K - int(margin)
    return basis.upto(top + 1) if top >= 0 else slice(0, 0)


def _pattern(basis: LongilexBasis, target) -> sp.csr_matrix:
    # 0/1 matrix with a one at (i, index_of[target(alpha_i)]) whenever the target is in the basis
    rows, cols = [], []
    for i, alpha in enumerate(basis.indices):
        j = basis.index_of.get(target(alpha))
        if j is not None:
            rows.append(i)
            cols.append(j)
    n = basis.size
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


def upsilon_power(basis: LongilexBasis, alpha) -> sp.csr_matrix:
    """Section of ``Upsilon_alpha``: entry ``(beta, beta')`` is one iff ``beta + alpha = beta'``."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != basis.D:
        raise ValueError(f"shift {alpha} has the wrong dimension for D={basis.D}")
    if longitude(alpha) > basis.K:
        raise ValueError(f"shift of longitude {longitude(alpha)} exceeds the truncation K={basis.K}")
    return _pattern(basis, lambda b: tuple(x + y for x, y in zip(b, alpha)))


def build_upsilon(basis: LongilexBasis, a: int) -> sp.csr_matrix:
    """``Upsilon_a`` for the 1-based variable index ``a`` (multiplication by ``z_a``)."""
    if not 1 <= a <= basis.D:
        raise ValueError(f"variable index {a} outside 1..{basis.D}")
    e = [0] * basis.D
    e[a - 1] = 1
    return upsilon_power(basis, e)


def laurent_of_upsilon(basis: LongilexBasis, L: LaurentPolynomial) -> np.ndarray:
    """Dense ``L(Upsilon) = sum_alpha L_alpha Upsilon_alpha``."""
    if L.D != basis.D:
        raise ValueError("dimension mismatch")
    out = np.zeros((basis.size, basis.size), dtype=complex)
    for alpha, c in L.terms.items():
        out += c * upsilon_power(basis, alpha).toarray()
    return out


def eta(basis: LongilexBasis) -> sp.csr_matrix:
    """Full reversal: one at ``(alpha, -alpha)``."""
    return _pattern(basis, lambda b: tuple(-x for x in b))


def eta_sigma(basis: LongilexBasis, sigma) -> sp.csr_matrix:
    """Partial reversal flipping the signs of the (1-based) coordinates in ``sigma``."""
    flip = {int(s) - 1 for s in sigma}
    return _pattern(basis, lambda b: tuple(-x if i in flip else x for i, x in enumerate(b)))


def partial_eta(basis: LongilexBasis, a: int) -> sp.csr_matrix:
    """``eta_a``, the reversal of coordinate ``a`` alone."""
    if not 1 <= a <= basis.D:
        raise ValueError(f"variable index {a} outside 1..{basis.D}")
    return eta_sigma(basis, (a,))


def exchange_matrix(m: int) -> np.ndarray:
    """``m x m`` anti-identity."""
    return np.eye(m)[::-1]


# ---------------------------------------------------------------- degree one polynomials


def degree_one_exponents(D: int) -> list:
    """The shell ``[1]`` in longilex order: ``-e_1, ..., -e_D, e_D, ..., e_1``."""
    return list(enumerate_shell(D, 1))


def linear_laurent(n) -> LaurentPolynomial:
    """``L_n(z) = n . chi_[1](z)`` for ``n`` in C^{2D} ordered like the shell ``[1]``."""
    n = np.asarray(n, dtype=complex)
    if n.ndim != 1 or n.size % 2:
        raise ValueError("n must be a vector of even length 2D")
    D = n.size // 2
    return LaurentPolynomial(D, dict(zip(degree_one_exponents(D), n)))


def slashed_matrix(basis: LongilexBasis, n) -> np.ndarray:
    """``L_n(Upsilon)``: the shift combination acting as multiplication by ``L_n``."""
    n = np.asarray(n, dtype=complex)
    if n.size != 2 * basis.D:
        raise ValueError(f"n must have length 2D = {2 * basis.D}")
    return laurent_of_upsilon(basis, linear_laurent(n))


def n_hat(n) -> np.ndarray:
    """Partner vector with ``slashed(n)^dagger = slashed(n_hat)``."""
    return np.conj(np.asarray(n, dtype=complex))[::-1]


# ---------------------------------------------------------------- Jacobi matrices


def jacobi(fact, alpha, hat: bool = False) -> np.ndarray:
    """``J_alpha = S Upsilon_alpha S^{-1}`` (or the hatted version with ``S_hat``)."""
    S = fact.Shat if hat else fact.S
    U = upsilon_power(fact.basis, alpha).toarray()
    return S @ U @ fact.inverse("Shat" if hat else "S")


def c_matrix(fact, alpha) -> np.ndarray:
    """``C_alpha = conj(S_hat) eta Upsilon_alpha S^{-1}``."""
    U = upsilon_power(fact.basis, alpha).toarray()
    return np.conj(fact.Shat) @ eta(fact.basis).toarray() @ U @ fact.inverse("S")


class SpectralSet:
    """Cached shift and reversal matrices for a basis."""

    def __init__(self, basis: LongilexBasis):
        self.basis = basis
        self._cache: dict = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def upsilon(self, a: int) -> sp.csr_matrix:
        return self._get(("U", a), lambda: build_upsilon(self.basis, a))

    def upsilon_power(self, alpha) -> sp.csr_matrix:
        alpha = tuple(alpha)
        return self._get(("Ua", alpha), lambda: upsilon_power(self.basis, alpha))

    def eta(self) -> sp.csr_matrix:
        return self._get(("eta",), lambda: eta(self.basis))

    def partial_eta(self, a: int) -> sp.csr_matrix:
        return self._get(("eta", a), lambda: partial_eta(self.basis, a))

    def L(self, L: LaurentPolynomial) -> np.ndarray:
        return laurent_of_upsilon(self.basis, L)

    def slashed(self, n) -> np.ndarray:
        return slashed_matrix(self.basis, n)

    def interior(self, margin: int) -> slice:
        return interior(self.basis, margin)


def pattern_coordinates(M) -> list:
    """Nonzero positions of a 0/1 matrix as sorted ``(row, col)`` pairs."""
    coo = sp.coo_matrix(M)
    return sorted(zip(coo.row.tolist(), coo.col.tolist()))


# ---------------------------------------------------------------- orthants


def _as_set(sigma) -> frozenset:
    return frozenset(int(s) for s in sigma)


def right_boundary(sigma, D: int) -> frozenset:
    """Members ``i`` of ``sigma`` whose cyclic successor is not in ``sigma`` (1-based)."""
    sigma = _as_set(sigma)
    return frozenset(i for i in sigma if (i % D) + 1 not in sigma)


def axis_rules(sigma, D: int) -> list:
    """Per-axis membership rule: one of ``'<=0', '<0', '>=0', '>0'``."""
    sigma = _as_set(sigma)
    comp = frozenset(range(1, D + 1)) - sigma
    b_sigma, b_comp = right_boundary(sigma, D), right_boundary(comp, D)
    rules = []
    for i in range(1, D + 1):
        if i in sigma:
            rules.append("<0" if i in b_sigma else "<=0")
        else:
            rules.append(">0" if i in b_comp else ">=0")
    return rules


_TESTS = {"<=0": lambda x: x <= 0, "<0": lambda x: x < 0, ">=0": lambda x: x >= 0, ">0": lambda x: x > 0}


def all_orthant_labels(D: int) -> list:
    return [tuple(c) for r in range(D + 1) for c in itertools.combinations(range(1, D + 1), r)]


def in_orthant(alpha, sigma, D: int | None = None) -> bool:
    alpha = tuple(int(a) for a in alpha)
    D = len(alpha) if D is None else D
    if _as_set(sigma) == frozenset(range(1, D + 1)):
        return all(a <= 0 for a in alpha) and any(a != 0 for a in alpha)
    return all(_TESTS[r](a) for r, a in zip(axis_rules(sigma, D), alpha))


def orthant_of(alpha) -> tuple:
    """The unique label ``sigma`` (sorted 1-based tuple) whose integer orthant holds ``alpha``."""
    alpha = tuple(int(a) for a in alpha)
    hits = [s for s in all_orthant_labels(len(alpha)) if in_orthant(alpha, s)]
    if len(hits) != 1:
        raise AssertionError(f"{alpha} lies in {len(hits)} orthants")
    return hits[0]


def orthant_split(basis: LongilexBasis) -> dict:
    """Partition of the basis positions by orthant label."""
    parts = {s: [] for s in all_orthant_labels(basis.D)}
    for i, alpha in enumerate(basis.indices):
        parts[orthant_of(alpha)].append(i)
    return parts


def in_polydisk_orthant(z, sigma) -> bool:
    """``|z_i| > 1`` for ``i`` in ``sigma`` and ``|z_i| < 1`` otherwise."""
    z = np.asarray(z, dtype=complex)
    s = _as_set(sigma)
    return all((abs(zi) > 1) if (i + 1) in s else (abs(zi) < 1) for i, zi in enumerate(z))


def cauchy_mohammed(sigma, z, zeta) -> complex:
    """Closed-form orthant kernel ``sum over the orthant of zeta^{-alpha} z^alpha``."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    D = z.size
    if not np.allclose(np.abs(zeta), 1.0, atol=1e-12):
        raise ValueError("zeta must lie on the unit torus")
    if not in_polydisk_orthant(z, sigma):
        raise ValueError(f"z is not in the polydisk orthant of {tuple(sorted(_as_set(sigma)))}")
    s = _as_set(sigma)
    if s == frozenset(range(1, D + 1)):
        return complex(np.prod(z / (z - zeta)) - 1)
    out = 1.0 + 0j
    for i, rule in enumerate(axis_rules(s, D)):
        zi, wi = z[i], zeta[i]
        out *= {
            "<=0": zi / (zi - wi),
            "<0": wi / (zi - wi),
            ">=0": wi / (wi - zi),
            ">0": zi / (wi - zi),
        }[rule]
    return complex(out)


def cauchy_mohammed_partial(sigma, z, zeta, B: int) -> complex:
    """Truncated series over orthant members with longitude ``<= B``.

    The per-axis sums are grouped by ``|alpha_i|`` and combined by convolution
    in the longitude variable, which avoids enumerating the lattice points.
    """
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    D = z.size
    s = _as_set(sigma)
    n = np.arange(B + 1)
    total = np.zeros(B + 1, dtype=complex)
    total[0] = 1.0
    full = s == frozenset(range(1, D + 1))
    rules = ["<=0"] * D if full else axis_rules(s, D)
    for i, rule in enumerate(rules):
        ratio = (zeta[i] / z[i]) if rule in ("<=0", "<0") else (z[i] / zeta[i])
        terms = ratio**n
        if rule in ("<0", ">0"):
            terms[0] = 0.0
        total = np.convolve(total, terms)[: B + 1]
    value = total.sum()
    return complex(value - 1.0 if full else value)

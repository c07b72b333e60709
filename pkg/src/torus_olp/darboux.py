"""Christoffel (Darboux) transformations by a nice Laurent polynomial ``L``.

The perturbed measure is ``L dmu``.  With ``m = longitude(L)`` and a poised
node set on the zero set of ``L``, the perturbed polynomials are

    TPhi_k(z) = L(U)_{k,k+m} / L(z) * [Phi_{k+m}(z) - Sig_{[k,m]} Sig_k^{-1} (Phi_k ... Phi_{k+m-1})(z)]

where ``U`` stands for the shift matrices and ``Sig`` are sample matrices of
``Phi`` values at the nodes.  Everything here can be cross-checked against a
direct factorization of the perturbed moment matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gaussborel import Factorization, factorize
from .laurent import LaurentPolynomial, is_nice
from .longilex import LongilexBasis, chi_eval
from .measure import FourierOracle, polynomial_weight_oracle
from .moments import build_moment
from .opbasis import eval_all, eval_family
from . import spectral

POISED_TOL = 1e-8
RANK_RTOL = 1e-10


class PoisednessFailure(RuntimeError):
    """No poised node set was found, or a supplied set is not poised."""


@dataclass
class NodeSet:
    points: np.ndarray  # shape (r, D)
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def to_json(self) -> list:
        return [[[float(c.real), float(c.imag)] for c in p] for p in self.points]

    @classmethod
    def from_json(cls, data) -> "NodeSet":
        pts = np.array([[complex(re, im) for re, im in p] for p in data], dtype=complex)
        return cls(pts, {"source": "supplied"})


def node_count(basis: LongilexBasis, k: int, m: int) -> int:
    """``r_{k,m} = N_{k+m-1} - N_{k-1}``: size of shells ``k..k+m-1``."""
    return basis.N(k + m - 1) - basis.N(k - 1)


def _shells(basis, k, m) -> slice:
    return slice(basis.N(k - 1), basis.N(k + m - 1))


def sample_matrices(fact: Factorization, nodes, k: int, m: int):
    """``(Sig_k^m, Sig_[k,m])``: columns are nodes, rows the shells ``k..k+m-1`` and ``k+m``."""
    pts = np.asarray(getattr(nodes, "points", nodes), dtype=complex)
    values = eval_all(fact, pts).T  # (N, r)
    b = fact.basis
    return values[_shells(b, k, m)], values[b.block(k + m)]


def poisedness(square: np.ndarray) -> float:
    """Reciprocal condition number of the column-normalized sample matrix.

    1 for orthogonal columns, 0 for a singular matrix.  The normalized
    determinant is not used: it shrinks geometrically with the node count even
    when the solve is perfectly accurate.
    """
    norms = np.linalg.norm(square, axis=0)
    if square.size == 0 or np.any(norms == 0):
        return 0.0
    sv = np.linalg.svd(square / norms, compute_uv=False)
    return float(sv[-1] / sv[0])


def zero_set_residual(L: LaurentPolynomial, points) -> float:
    """``max |L(p)|`` relative to the coefficient scale of ``L``."""
    scale = np.abs(L.coefficients).sum()
    return float(np.abs(L.evaluate(np.asarray(points))).max() / scale)


def _roots_last_variable(L: LaurentPolynomial, head) -> np.ndarray:
    # L restricted to fixed z_1..z_{D-1}, as a polynomial in z_D after clearing negative powers
    D = L.D
    powers = L.support[:, D - 1]
    lo, hi = int(powers.min()), int(powers.max())
    poly = np.zeros(hi - lo + 1, dtype=complex)
    for alpha, c in L.terms.items():
        rest = np.prod([head[i] ** alpha[i] for i in range(D - 1)]) if D > 1 else 1.0
        poly[hi - alpha[D - 1]] += c * rest
    roots = np.roots(poly)
    return roots[np.abs(roots) > 1e-12]


def sample_nodes(
    L: LaurentPolynomial,
    fact: Factorization,
    k: int,
    seed: int = 0,
    max_retries: int = 200,
    separation: float = 1e-3,
) -> NodeSet:
    """Random poised nodes on ``{L = 0}`` for the shells ``k..k+m-1``.

    For ``D >= 2`` the first ``D - 1`` coordinates are drawn at random
    (``|z_1|`` in ``[0.8, 1.25]``, the rest on the unit circle) and ``z_D`` is a
    root of the resulting one-variable polynomial; successive nodes cycle
    through the roots.  Parameter draws whose roots come closer than
    ``separation`` (near branch points) are discarded.  For ``D = 1`` the nodes
    are the roots of ``L`` themselves.
    """
    m = L.longitude()
    b = fact.basis
    r = node_count(b, k, m)
    if k + m > b.K:
        raise ValueError(f"need shells up to {k + m}, factorization has {b.K}")
    rng = np.random.default_rng(seed)
    if L.D == 1:
        roots = _roots_last_variable(L, ())
        pts = roots.reshape(-1, 1)
        if len(pts) != r:
            raise PoisednessFailure(f"L has {len(pts)} nonzero roots, {r} nodes are needed")
        square, _ = sample_matrices(fact, pts, k, m)
        if poisedness(square) < POISED_TOL:
            raise PoisednessFailure("the roots of L are not poised")
        return NodeSet(pts, {"method": "roots", "poisedness": poisedness(square)})
    for attempt in range(max_retries):
        pts = []
        guard = 0
        while len(pts) < r and guard < 50 * r:
            guard += 1
            radius = rng.uniform(0.8, 1.25)
            head = [radius * np.exp(2j * np.pi * rng.uniform())]
            head += list(np.exp(2j * np.pi * rng.uniform(size=L.D - 2)))
            roots = _roots_last_variable(L, head)
            if len(roots) == 0:
                continue
            if len(roots) > 1:
                gaps = np.abs(roots[:, None] - roots[None, :]) + np.eye(len(roots))
                if gaps.min() < separation:
                    continue
            roots = roots[np.argsort(np.abs(roots))]
            p = np.array(head + [roots[len(pts) % len(roots)]], dtype=complex)
            if pts and np.min(np.linalg.norm(np.array(pts) - p, axis=1)) < separation:
                continue
            pts.append(p)
        if len(pts) < r:
            continue
        pts = np.array(pts)
        square, _ = sample_matrices(fact, pts, k, m)
        score = poisedness(square)
        if score >= POISED_TOL:
            return NodeSet(pts, {"method": "last-variable roots", "seed": seed, "attempt": attempt, "poisedness": score})
    raise PoisednessFailure(f"no poised node set after {max_retries} attempts")


def validate_nodes(L: LaurentPolynomial, fact: Factorization, nodes, k: int, tol: float = 1e-10) -> NodeSet:
    """Check membership in ``{L = 0}``, cardinality and poisedness of supplied nodes."""
    ns = nodes if isinstance(nodes, NodeSet) else NodeSet(np.asarray(nodes, dtype=complex), {"source": "supplied"})
    m = L.longitude()
    r = node_count(fact.basis, k, m)
    if len(ns) != r:
        raise PoisednessFailure(f"{len(ns)} nodes supplied, {r} needed")
    if zero_set_residual(L, ns.points) > tol:
        raise ValueError("some nodes are not on the zero set of L")
    square, _ = sample_matrices(fact, ns.points, k, m)
    if poisedness(square) < POISED_TOL:
        raise PoisednessFailure("supplied nodes are not poised")
    return ns


# ---------------------------------------------------------------- Christoffel formula


def _leading_block(basis, L, k, m, offset=0):
    LU = spectral.laurent_of_upsilon(basis, L)
    return LU[basis.block(k), basis.block(k + m - offset)]


def resolvent_row(fact: Factorization, L: LaurentPolynomial, nodes, k: int) -> np.ndarray:
    """Nonzero row blocks ``omega_{[k], [k..k+m]}`` of the resolvent, from the nodes."""
    m = L.longitude()
    square, border = sample_matrices(fact, nodes, k, m)
    lead = _leading_block(fact.basis, L, k, m)
    coeff = -lead @ np.linalg.solve(square.T, border.T).T
    return np.hstack([coeff, lead])


def christoffel_transform(fact: Factorization, L: LaurentPolynomial, nodes, k: int, z) -> np.ndarray:
    """``TPhi_[k](z)`` from the original family and the sample matrices."""
    z = np.asarray(z, dtype=complex)
    Lz = L.evaluate(z)
    if abs(Lz) < 1e-14:
        raise ZeroDivisionError("L vanishes at the evaluation point")
    m = L.longitude()
    row = resolvent_row(fact, L, nodes, k)
    b = fact.basis
    phis = eval_all(fact, z)[b.N(k - 1): b.N(k + m)]
    return row @ phis / Lz


def christoffel_coefficients(fact: Factorization, L: LaurentPolynomial, nodes, k: int):
    """Monomial coefficients of ``TPhi_[k]`` and the division remainder.

    ``L * TPhi_[k]`` equals ``omega_row @ S[k..k+m]`` in the monomial basis;
    dividing by ``L`` is done by solving the linear system ``L(U)^T x = numerator``
    restricted to shells ``0..k``.  The second value is the size of what is left
    over, which vanishes when the division is exact.
    """
    m = L.longitude()
    b = fact.basis
    row = resolvent_row(fact, L, nodes, k)
    numer = row @ fact.S[b.N(k - 1): b.N(k + m), :]  # coefficients of L * TPhi_k on all shells
    LU = spectral.laurent_of_upsilon(b, L)
    n = b.N(k)
    A = LU[:n, :].T  # column j: coefficients of z^{alpha_j} L
    x, *_ = np.linalg.lstsq(A, numer.T, rcond=None)
    remainder = float(np.abs(A @ x - numer.T).max())
    return x.T, remainder


def transformed_quasitau(fact: Factorization, L: LaurentPolynomial, nodes, k: int) -> np.ndarray:
    """``TH_k = omega_{[k],[k]} H_k``."""
    row = resolvent_row(fact, L, nodes, k)
    nk = fact.basis.shell_len(k)
    return row[:, :nk] @ fact.H_block(k)


def transformed_beta(fact: Factorization, L: LaurentPolynomial, nodes, k: int):
    """``(Tbeta_k, rank)`` from ``Tbeta_k L(U)_{k-1,k+m-1} = omega_{k,k+m-1} + L(U)_{k,k+m} beta_{k+m} - L(U)_{k,k+m-1}``.

    Solved with the pseudo-inverse as a right inverse; ``rank`` is the numerical
    rank of ``L(U)_{k-1,k+m-1}`` (a right inverse exists when it equals ``|[k-1]|``).
    """
    if k < 1:
        raise ValueError("Tbeta is defined for k >= 1")
    m = L.longitude()
    b = fact.basis
    if k + m > b.K:
        raise ValueError("the section is too short for this shell")
    row = resolvent_row(fact, L, nodes, k)
    LU = spectral.laurent_of_upsilon(b, L)
    blk = lambda i, j: LU[b.block(i), b.block(j)]
    start = b.N(k + m - 2) - b.N(k - 1)  # columns of shell k+m-1 inside the row
    omega_prev = row[:, start: start + b.shell_len(k + m - 1)]
    rhs = omega_prev + blk(k, k + m) @ fact.beta(k + m) - blk(k, k + m - 1)
    A = blk(k - 1, k + m - 1)
    sv = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sv > RANK_RTOL * sv[0])) if sv.size and sv[0] > 0 else 0
    if rank < A.shape[0]:
        raise np.linalg.LinAlgError(f"L(U)_{{k-1,k+m-1}} has rank {rank} < {A.shape[0]}: no right inverse")
    return rhs @ np.linalg.pinv(A), rank


# ---------------------------------------------------------------- direct route and resolvents


def perturbed_factorization(base: FourierOracle, L: LaurentPolynomial, basis: LongilexBasis) -> Factorization:
    """Factorization of the moment matrix of ``L dmu`` on the given basis."""
    return factorize(build_moment(polynomial_weight_oracle(base, L), basis))


@dataclass
class Resolvents:
    omega: np.ndarray
    omega_hat: np.ndarray
    M: np.ndarray
    M_hat: np.ndarray
    m: int


def resolvent(fact: Factorization, tfact: Factorization, L: LaurentPolynomial) -> Resolvents:
    """``omega = TS L(U) S^{-1}``, ``omega_hat = TS_hat L_adj(U) S_hat^{-1}``, ``M = S TS^{-1}``, ``M_hat = S_hat TS_hat^{-1}``."""
    b = fact.basis
    LU = spectral.laurent_of_upsilon(b, L)
    LA = spectral.laurent_of_upsilon(b, L.adjoint())
    return Resolvents(
        omega=tfact.S @ LU @ fact.inverse("S"),
        omega_hat=tfact.Shat @ LA @ fact.inverse("Shat"),
        M=fact.S @ tfact.inverse("S"),
        M_hat=fact.Shat @ tfact.inverse("Shat"),
        m=L.longitude(),
    )


def block_band_residual(A: np.ndarray, basis: LongilexBasis, below: int, above: int, rows_upto: int | None = None) -> float:
    """Largest entry outside the block band ``-below..above`` (rows limited to shells ``<= rows_upto``)."""
    worst = 0.0
    top = basis.K if rows_upto is None else rows_upto
    for i in range(top + 1):
        for j in range(basis.K + 1):
            if j - i > above or i - j > below:
                blk = A[basis.block(i), basis.block(j)]
                if blk.size:
                    worst = max(worst, float(np.abs(blk).max()))
    return worst


def intertwining_residuals(fact, tfact, L, res: Resolvents, z) -> dict:
    """``omega Phi = L TPhi`` (rows up to shell ``K - m``) and ``M TPhi = Phi``."""
    b = fact.basis
    m = res.m
    phi, tphi = eval_all(fact, z), eval_all(tfact, z)
    rows = spectral.interior(b, m)
    r1 = res.omega[rows] @ phi - L.evaluate(z) * tphi[rows]
    r2 = res.M @ tphi - phi
    return {"omega": float(np.abs(r1).max()), "M": float(np.abs(r2).max())}


def node_resolvent(fact: Factorization, L: LaurentPolynomial, seed: int = 0, upto: int | None = None) -> np.ndarray:
    """Resolvent rows for shells ``0..upto`` (default ``K - m``) assembled from fresh node sets."""
    b = fact.basis
    m = L.longitude()
    upto = b.K - m if upto is None else upto
    if upto > b.K - m:
        raise ValueError(f"resolvent rows beyond shell {b.K - m} need a longer section")
    omega = np.zeros((b.size, b.size), dtype=complex)
    for k in range(upto + 1):
        nodes = sample_nodes(L, fact, k, seed=seed + k)
        omega[b.block(k), b.N(k - 1): b.N(k + m)] = resolvent_row(fact, L, nodes, k)
    return omega


def jacobi_lu_residual(
    fact: Factorization, tfact: Factorization, L: LaurentPolynomial, omega: np.ndarray, upto: int | None = None
) -> dict:
    """``L(J) = M omega`` and ``L(TJ) = omega M`` on rows and columns up to shell ``upto`` (default ``K - m``).

    ``omega`` may come from nodes; ``M = S TS^{-1}`` comes from the direct route.
    """
    b = fact.basis
    m = L.longitude()
    LU = spectral.laurent_of_upsilon(b, L)
    LJ = fact.S @ LU @ fact.inverse("S")
    LTJ = tfact.S @ LU @ tfact.inverse("S")
    M = fact.S @ tfact.inverse("S")
    s = spectral.interior(b, m) if upto is None else b.upto(upto + 1)
    scale = max(1.0, float(np.abs(LJ[s, s]).max()))
    r1 = np.abs((M @ omega - LJ)[s, s]).max() / scale
    # omega M only needs omega rows inside s; M columns beyond s do not reach rows in s
    r2 = np.abs((omega @ M - LTJ)[s, s]).max() / scale
    return {"LJ": float(r1), "LTJ": float(r2)}


def jacobi_determinant_residual(fact: Factorization, L: LaurentPolynomial, TH_blocks, k: int) -> float:
    """Relative gap in ``det L(J)^{[k]} = prod_{l<k} det TH_l / det H_l``."""
    b = fact.basis
    LU = spectral.laurent_of_upsilon(b, L)
    LJ = fact.S @ LU @ fact.inverse("S")
    s = b.upto(k)
    lhs = np.linalg.det(LJ[s, s])
    rhs = np.prod([np.linalg.det(TH_blocks[l]) / fact.det_H(l) for l in range(k)])
    return float(abs(lhs - rhs) / max(abs(rhs), 1e-300))


# ---------------------------------------------------------------- Vandermonde


def vandermonde(basis: LongilexBasis, nodes, k: int, m: int) -> np.ndarray:
    """Monomials of shells ``0..k+m-1`` at the nodes: ``N_{k+m-1} x r``."""
    pts = np.asarray(getattr(nodes, "points", nodes), dtype=complex)
    return chi_eval(basis, pts).T[: basis.N(k + m - 1)]


def vandermonde_rank(L: LaurentPolynomial, basis: LongilexBasis, nodes, k: int) -> dict:
    m = L.longitude()
    V = vandermonde(basis, nodes, k, m)
    sv = np.linalg.svd(V, compute_uv=False)
    rank = int(np.sum(sv > RANK_RTOL * sv[0])) if sv.size and sv[0] > 0 else 0
    return {
        "rank": rank,
        "columns": V.shape[1],
        "rows": V.shape[0],
        "full_column_rank": rank == V.shape[1],
        "left_null_dim": V.shape[0] - rank,
        "singular_values": sv.tolist(),
    }


# ---------------------------------------------------------------- kernel connection


def _kernel_terms(fact, z1, z2, upto):
    b = fact.basis
    n = b.N(upto - 1)
    left = eval_all(fact, z1, hat=True)[:n].conj()
    right = eval_all(fact, z2)[:n]
    return complex(left @ np.linalg.solve(fact.H[:n, :n], right))


def kernel_connection(fact, tfact, L, z1, z2, l: int, variant: int = 1) -> complex:
    """Right-hand side of one of four connection formulas for ``K_{l+m}(z1, z2)``.

    1: ``L(z2) TK_{l+m} - sum_j TPhi_hat_j^dag TH_j^{-1} sum_{i=l+m}^{j+m} omega_ji Phi_i``
    2: ``L(z2) TK_l + sum_j TPhi_hat_j^dag TH_j^{-1} sum_{i=j}^{l+m-1} omega_ji Phi_i``
    3, 4: the same with ``L(conj(z1)^{-1})`` and ``omega_hat`` acting on ``Phi_hat(z1)``.
    The sums over ``j`` run over ``l..l+m-1``.
    """
    b = fact.basis
    m = L.longitude()
    if l + 2 * m - 1 > b.K:
        raise ValueError("section too short for this connection formula")
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    res = resolvent(fact, tfact, L)
    phi, phihat = eval_all(fact, z2), eval_all(fact, z1, hat=True)
    tphi, tphihat = eval_all(tfact, z2), eval_all(tfact, z1, hat=True)
    first = variant in (1, 3)
    upto = l + m if first else l
    TK = _kernel_terms(tfact, z1, z2, upto)
    total = 0j
    for j in range(l, l + m):
        i_range = range(l + m, j + m + 1) if first else range(j, l + m)
        THj_inv = np.linalg.inv(tfact.H_block(j))
        if variant in (1, 2):
            acc = sum(res.omega[b.block(j), b.block(i)] @ phi[b.block(i)] for i in i_range)
            total += tphihat[b.block(j)].conj() @ THj_inv @ acc
        else:
            acc = sum(res.omega_hat[b.block(j), b.block(i)] @ phihat[b.block(i)] for i in i_range)
            total += acc.conj() @ THj_inv @ tphi[b.block(j)]
    factor = L.evaluate(z2) if variant in (1, 2) else L.evaluate(1 / np.conj(z1))
    sign = -1 if first else 1
    return complex(factor * TK + sign * total)


def kernel_connection_check(fact, tfact, L, z1, z2, l: int, variant: int = 1) -> float:
    m = L.longitude()
    exact = _kernel_terms(fact, z1, z2, l + m)
    return abs(exact - kernel_connection(fact, tfact, L, z1, z2, l, variant))


def nicety_guard(L: LaurentPolynomial):
    report = is_nice(L)
    if not report.nice:
        raise ValueError(f"L is not nice; deficient orthant {report.deficient_orthant}")
    return report

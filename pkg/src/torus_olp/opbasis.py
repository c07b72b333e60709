"""Biorthogonal Laurent polynomial families, second-kind functions and kernels.

``Phi(z) = S chi(z)`` and ``Phi_hat(z) = S_hat chi(z)``; the shell-``k`` piece
of either is monic (identity coefficient on ``chi_[k]``).  The level-``k``
kernel is ``K_k(z1, z2) = sum_{l<k} Phi_hat_l(z1)^dagger H_l^{-1} Phi_l(z2)``.
Inner products are taken through the moment matrix unless a function says
it integrates on a grid.
"""

from __future__ import annotations

import numpy as np

from .gaussborel import Factorization, last_quasi_determinant
from .longilex import chi_eval
from .moments import MomentMatrix
from .measure import FourierOracle
from . import spectral


def _pt(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("evaluation points need nonzero coordinates")
    return z


def eval_all(fact: Factorization, z, hat: bool = False) -> np.ndarray:
    """``Phi(z)`` (or ``Phi_hat(z)``) over every shell; ``z`` may be batched ``(..., D)``."""
    S = fact.Shat if hat else fact.S
    return chi_eval(fact.basis, _pt(z)) @ S.T


def eval_family(fact: Factorization, k: int, z, hat: bool = False) -> np.ndarray:
    """Shell-``k`` polynomials ``Phi_[k](z)``."""
    if not 0 <= k < fact.levels:
        raise IndexError(f"shell {k} outside 0..{fact.levels - 1}")
    b = fact.basis
    S = fact.Shat if hat else fact.S
    chi = chi_eval(b, _pt(z))[..., : b.N(k)]
    return chi @ S[b.block(k), : b.N(k)].T


def phi_via_qd(G: MomentMatrix, k: int, z) -> np.ndarray:
    """``Phi_[k](z)`` as the last quasi-determinant of ``G^{[k]}`` bordered with ``chi``."""
    b = G.basis
    chi = chi_eval(b, _pt(z))
    n = b.N(k - 1)
    top = np.hstack([G.truncation(k), chi[:n, None]])
    rows = G.data[b.block(k), :n]
    bottom = np.hstack([rows, chi[b.block(k), None]])
    return last_quasi_determinant(np.vstack([top, bottom]), (b.shell_len(k), 1))[:, 0]


def basis_determinant(fact: Factorization, k: int) -> complex:
    """Determinant of the coefficient matrix of ``{Phi_alpha : |alpha| <= k}``."""
    s = fact.basis.upto(k + 1)
    return complex(np.linalg.det(fact.S[s, s]))


def biorthogonality_residual(fact: Factorization, G: MomentMatrix) -> float:
    """``max |S G S_hat^dagger - H|`` over all block pairs."""
    P = fact.S @ G.data @ fact.Shat.conj().T
    return float(np.abs(P - fact.H).max())


def expansion_coefficients(fact: Factorization, G: MomentMatrix, coeffs) -> np.ndarray:
    """Coefficients ``a`` with ``L = sum a_alpha Phi_alpha`` by projection.

    ``coeffs`` lists ``L`` in the monomial basis.  Shell by shell,
    ``a_k^T = (oint L Phi_hat_k^dagger dmu) H_k^{-1}`` with the integral read
    off the moment matrix.
    """
    v = np.asarray(coeffs, dtype=complex)
    proj = v @ G.data @ fact.Shat.conj().T
    out = np.zeros_like(proj)
    for k in range(fact.levels):
        s = fact.basis.block(k)
        out[s] = np.linalg.solve(fact.H_block(k).T, proj[s])
    return out


def synthesize(fact: Factorization, a) -> np.ndarray:
    """Monomial coefficients of ``sum a_alpha Phi_alpha``."""
    return np.asarray(a) @ fact.S


# ---------------------------------------------------------------- second kind


def second_kind(fact: Factorization, G: MomentMatrix, k: int, z) -> np.ndarray:
    """Shell ``k`` of ``H^{-1} S G chi(z)``; exact only for banded ``G``."""
    b = fact.basis
    chi = chi_eval(b, _pt(z))
    vec = fact.S[b.block(k), :] @ (G.data @ chi)
    return np.linalg.solve(fact.H_block(k), vec)


def second_kind_check(fact: Factorization, G: MomentMatrix, oracle: FourierOracle, k: int, z) -> float:
    """Residual of ``C_hat_[k](z) - H_k^{-1} Phi_[k](z) w(z)`` for a Laurent weight ``w``.

    The series ``G chi`` terminates for a Laurent weight of longitude ``m``;
    the finite section reproduces it when ``k + m`` stays inside the section.
    """
    w = oracle.laurent_weight
    if w is None:
        raise ValueError("second-kind identity needs a Laurent polynomial weight (banded moments)")
    m = w.longitude()
    if k + m > fact.basis.K:
        raise ValueError(f"shell {k} plus weight longitude {m} exceeds the section")
    lhs = second_kind(fact, G, k, z)
    rhs = np.linalg.solve(fact.H_block(k), eval_family(fact, k, z)) * w.evaluate(_pt(z))
    return float(np.abs(lhs - rhs).max())


# ---------------------------------------------------------------- kernels


def cd_kernel(fact: Factorization, k: int, z1, z2) -> complex:
    """Level-``k`` Christoffel-Darboux kernel (shells ``0..k-1``)."""
    if not 0 <= k <= fact.levels:
        raise IndexError(f"kernel level {k} outside 0..{fact.levels}")
    n = fact.basis.N(k - 1)
    left = eval_all(fact, z1, hat=True)[:n]
    right = eval_all(fact, z2)[:n]
    Hs = fact.H[:n, :n]
    return complex(left.conj() @ np.linalg.solve(Hs, right))


def abc_kernel(G: MomentMatrix, k: int, z1, z2) -> complex:
    """``chi(z1)^dagger (G^{[k]})^{-1} chi(z2)`` on shells ``0..k-1``."""
    n = G.basis.N(k - 1)
    c1 = chi_eval(G.basis, _pt(z1))[:n]
    c2 = chi_eval(G.basis, _pt(z2))[:n]
    return complex(c1.conj() @ np.linalg.solve(G.truncation(k), c2))


def abc_check(fact: Factorization, G: MomentMatrix, k: int, z1, z2) -> float:
    return abs(cd_kernel(fact, k, z1, z2) - abc_kernel(G, k, z1, z2))


def kernel_symmetry_check(fact: Factorization, k: int, z1, z2) -> float:
    z1, z2 = _pt(z1), _pt(z2)
    return abs(cd_kernel(fact, k, z1, z2) - cd_kernel(fact, k, 1 / np.conj(z2), 1 / np.conj(z1)))


def torus_grid(D: int, M: int) -> np.ndarray:
    axis = 2 * np.pi * np.arange(M) / M
    return np.stack(np.meshgrid(*([axis] * D), indexing="ij"), axis=-1).reshape(-1, D)


def reproducing_check(fact: Factorization, oracle: FourierOracle, k: int, z1, z2, M: int | None = None) -> float:
    """Residual of ``K(z1, z2) - oint K(z1, zeta) K(zeta, z2) dmu(zeta)`` on an ``M^D`` grid."""
    b = fact.basis
    if M is None:
        M = max(4 * fact.levels + 9, 48 if b.D <= 2 else 24)
    theta = torus_grid(b.D, M)
    zeta = np.exp(1j * theta)
    w = np.asarray(oracle.weight(theta)) / theta.shape[0]
    n = b.N(k - 1)
    Hs = fact.H[:n, :n]
    phi = eval_all(fact, zeta)[:, :n]  # Phi(zeta), rows per node
    phihat = eval_all(fact, zeta, hat=True)[:, :n]
    left = eval_all(fact, z1, hat=True)[:n].conj() @ np.linalg.inv(Hs)  # row vector
    right = np.linalg.solve(Hs, eval_all(fact, z2)[:n])
    k1 = phi @ left  # K(z1, zeta)
    k2 = phihat.conj() @ right  # K(zeta, z2)
    integral = np.sum(w * k1 * k2)
    return abs(cd_kernel(fact, k, z1, z2) - integral)


# ---------------------------------------------------------------- recursions


def three_term_parts(fact: Factorization, n, k: int, hat: bool = False):
    """Coefficient blocks ``(lower, diagonal, upper)`` of the shell-``k`` recursion.

    ``L_n(z) Phi_k = lower Phi_{k-1} + diagonal Phi_k + upper Phi_{k+1}`` with
    ``lower = H_k nslash_{k,k-1} H_{k-1}^{-1}`` and
    ``diagonal = beta_k nslash_{k-1,k} - nslash_{k,k+1} beta_{k+1}``.  The hatted
    family uses ``H^dagger`` and ``beta_hat``.
    """
    if not 0 <= k <= fact.levels - 2:
        raise IndexError(f"three-term relation needs 0 <= k <= {fact.levels - 2}")
    b = fact.basis
    ns = spectral.slashed_matrix(b, n)
    blk = lambda i, j: ns[b.block(i), b.block(j)]
    beta = fact.beta_hat if hat else fact.beta
    Hk = fact.H_block(k).conj().T if hat else fact.H_block(k)
    upper = blk(k, k + 1)
    diagonal = -upper @ beta(k + 1)
    lower = None
    if k >= 1:
        Hm = fact.H_block(k - 1).conj().T if hat else fact.H_block(k - 1)
        diagonal = diagonal + beta(k) @ blk(k - 1, k)
        lower = Hk @ blk(k, k - 1) @ np.linalg.inv(Hm)
    return lower, diagonal, upper


def three_term_residual(fact: Factorization, n, k: int, z, hat: bool = False) -> float:
    z = _pt(z)
    lower, diagonal, upper = three_term_parts(fact, n, k, hat)
    Ln = spectral.linear_laurent(n).evaluate(z)
    ev = lambda j: eval_family(fact, j, z, hat)
    rhs = diagonal @ ev(k) + upper @ ev(k + 1)
    if lower is not None:
        rhs = rhs + lower @ ev(k - 1)
    return float(np.abs(Ln * ev(k) - rhs).max())


def cd_formula(fact: Factorization, n, k: int, z1, z2) -> complex:
    """Kernel of level ``k`` from the shells ``k-1`` and ``k`` alone.

    ``(L_n(z2) - L_n(conj(z1)^{-1})) K_k = Phi_hat_{k-1}(z1)^dagger H_{k-1}^{-1} nslash_{k-1,k} Phi_k(z2)
    - Phi_hat_k(z1)^dagger nslash_{k,k-1} H_{k-1}^{-1} Phi_{k-1}(z2)``.
    """
    if not 1 <= k <= fact.levels - 1:
        raise IndexError(f"formula needs 1 <= k <= {fact.levels - 1}")
    z1, z2 = _pt(z1), _pt(z2)
    b = fact.basis
    ns = spectral.slashed_matrix(b, n)
    Ln = spectral.linear_laurent(n)
    denom = Ln.evaluate(z2) - Ln.evaluate(1 / np.conj(z1))
    if abs(denom) < 1e-8:
        raise ZeroDivisionError("L_n(z2) and L_n(conj(z1)^{-1}) nearly coincide")
    Hinv = np.linalg.inv(fact.H_block(k - 1))
    ph_km1 = eval_family(fact, k - 1, z1, hat=True).conj()
    ph_k = eval_family(fact, k, z1, hat=True).conj()
    term1 = ph_km1 @ Hinv @ ns[b.block(k - 1), b.block(k)] @ eval_family(fact, k, z2)
    term2 = ph_k @ ns[b.block(k), b.block(k - 1)] @ Hinv @ eval_family(fact, k - 1, z2)
    return complex((term1 - term2) / denom)


def reversal_symmetry_check(fact: Factorization, z) -> float:
    """``max |eta Phi(z) - conj(S_hat) chi(z^{-1})|``."""
    z = _pt(z)
    E = spectral.eta(fact.basis)
    lhs = E @ eval_all(fact, z)
    rhs = np.conj(fact.Shat) @ chi_eval(fact.basis, 1 / z)
    return float(np.abs(lhs - rhs).max())

"""Block Gauss-Borel factorization ``G = S^{-1} H (S_hat^{-1})^dagger``.

``S`` and ``S_hat`` are block lower unitriangular, ``H`` is block diagonal
with the quasi-tau blocks ``H_k``.  The blocks follow the longilex shells.  No
pivoting across blocks is done: a singular pivot block is reported as an error
because reordering would destroy the shell structure.
"""

from __future__ import annotations

import json

import numpy as np
import scipy.linalg as sla

from .longilex import LongilexBasis
from .moments import MomentMatrix, bordered_col_truncation, bordered_row_truncation

SINGULAR_RTOL = 1e-10


class SingularBlock(np.linalg.LinAlgError):
    """Pivot block ``k`` is numerically singular; the matrix is not quasi-definite."""

    def __init__(self, k: int, ratio: float):
        super().__init__(f"pivot block {k} is singular (sigma_min / sigma_max = {ratio:.3e})")
        self.k = k
        self.ratio = ratio


def _check_pivot(P: np.ndarray, k: int, rtol: float):
    sv = np.linalg.svd(P, compute_uv=False)
    ratio = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    if not ratio >= rtol:
        raise SingularBlock(k, ratio)


class Factorization:
    """Result of :func:`factorize` with block accessors."""

    def __init__(self, basis: LongilexBasis, S, H, Shat, lower, upper):
        self.basis = basis
        self.S = S
        self.H = H
        self.Shat = Shat
        self.lower = lower  # S^{-1}
        self.upper = upper  # (S_hat^{-1})^dagger
        self._inv: dict = {}

    @property
    def levels(self) -> int:
        return self.basis.K + 1

    def _b(self, k):
        return self.basis.block(k)

    def H_block(self, k: int) -> np.ndarray:
        return self.H[self._b(k), self._b(k)]

    def H_inv_block(self, k: int) -> np.ndarray:
        return np.linalg.inv(self.H_block(k))

    def beta(self, k: int) -> np.ndarray:
        """``S_{[k],[k-1]}`` for ``k >= 1``."""
        if not 1 <= k < self.levels:
            raise IndexError(f"beta needs 1 <= k < {self.levels}")
        return self.S[self._b(k), self._b(k - 1)]

    def beta_hat(self, k: int) -> np.ndarray:
        if not 1 <= k < self.levels:
            raise IndexError(f"beta_hat needs 1 <= k < {self.levels}")
        return self.Shat[self._b(k), self._b(k - 1)]

    def S_block(self, k: int, l: int, hat: bool = False) -> np.ndarray:
        M = self.Shat if hat else self.S
        return M[self._b(k), self._b(l)]

    def inverse(self, name: str) -> np.ndarray:
        """Cached inverse of ``"S"``, ``"Shat"`` or ``"H"``."""
        if name not in self._inv:
            if name == "S":
                self._inv[name] = self.lower
            elif name == "Shat":
                self._inv[name] = self.upper.conj().T
            elif name == "H":
                self._inv[name] = sla.block_diag(
                    *[np.linalg.inv(self.H_block(k)) for k in range(self.levels)]
                ).astype(complex)
            else:
                raise KeyError(name)
        return self._inv[name]

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.H @ self.upper

    def det_H(self, k: int) -> complex:
        return complex(np.linalg.det(self.H_block(k)))

    def to_json(self, full: bool = False) -> dict:
        def enc(M):
            return {"re": np.real(M).tolist(), "im": np.imag(M).tolist()}

        out = {
            "D": self.basis.D,
            "levels": self.levels,
            "H": [enc(self.H_block(k)) for k in range(self.levels)],
            "beta": [enc(self.beta(k)) for k in range(1, self.levels)],
            "beta_hat": [enc(self.beta_hat(k)) for k in range(1, self.levels)],
        }
        if full:
            out["S"] = enc(self.S)
            out["Shat"] = enc(self.Shat)
        return out

    def dumps(self, full: bool = False) -> str:
        return json.dumps(self.to_json(full))


def factorize(G, rtol: float = SINGULAR_RTOL) -> Factorization:
    """Blockwise Schur-complement recursion without inter-block pivoting."""
    if not isinstance(G, MomentMatrix):
        raise TypeError("factorize expects a MomentMatrix")
    basis = G.basis
    n = basis.size
    A = np.array(G.data, dtype=complex)
    lower = np.eye(n, dtype=complex)
    upper = np.eye(n, dtype=complex)
    H = np.zeros((n, n), dtype=complex)
    for k in range(basis.K + 1):
        b = basis.block(k)
        rest = slice(b.stop, n)
        P = A[b, b]
        _check_pivot(P, k, rtol)
        H[b, b] = P
        if b.stop == n:
            break
        lu = sla.lu_factor(P)
        right = sla.lu_solve(lu, A[b, rest])  # P^{-1} A[k, rest]
        left = sla.lu_solve(lu, A[rest, b].T, trans=1).T  # A[rest, k] P^{-1}
        lower[rest, b] = left
        upper[b, rest] = right
        A[rest, rest] -= A[rest, b] @ right
    eye = np.eye(n)
    S = sla.solve_triangular(lower, eye, lower=True, unit_diagonal=True)
    Shat_dag_inv = upper  # (S_hat^{-1})^dagger
    Shat = sla.solve_triangular(Shat_dag_inv.conj().T, eye, lower=True, unit_diagonal=True)
    return Factorization(basis, S, H, Shat, lower, upper)


# ---------------------------------------------------------------- quasi-determinants


def last_quasi_determinant(M, last: int | tuple) -> np.ndarray:
    """Schur complement ``D - C A^{-1} B`` of the trailing block.

    ``last`` is the size of the trailing block, either one integer (square) or
    a ``(rows, cols)`` pair for rectangular borders.
    """
    M = np.asarray(M)
    r, c = (last, last) if np.isscalar(last) else last
    p, q = M.shape[0] - r, M.shape[1] - c
    if p != q:
        raise ValueError("the leading block must be square")
    A, B, C, Dm = M[:p, :q], M[:p, q:], M[p:, :q], M[p:, q:]
    if p == 0:
        return Dm.copy()
    try:
        return Dm - C @ np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("leading block of the quasi-determinant is singular") from exc


def quasi_tau_via_qd(G: MomentMatrix, k: int) -> np.ndarray:
    """``H_k`` as the last quasi-determinant of ``G^{[k+1]}``."""
    return last_quasi_determinant(G.truncation(k + 1), G.basis.shell_len(k))


def subdiag_via_qd(G: MomentMatrix, k: int):
    """``(beta_k, beta_hat_k)`` from bordered truncations.

    ``beta_k = -Theta(G^{[k]}_k) H_{k-1}^{-1}`` and
    ``beta_hat_k = -(H_{k-1}^{-1} Theta(Ghat^{[k]}_k))^dagger``.
    """
    b = G.basis
    Hkm1 = quasi_tau_via_qd(G, k - 1)
    row = bordered_row_truncation(G, k, k)
    col = bordered_col_truncation(G, k, k)
    th_row = last_quasi_determinant(row, (b.shell_len(k), b.shell_len(k - 1)))
    th_col = last_quasi_determinant(col, (b.shell_len(k - 1), b.shell_len(k)))
    beta = -np.linalg.solve(Hkm1.T, th_row.T).T
    beta_hat = -np.linalg.solve(Hkm1, th_col).conj().T
    return beta, beta_hat


def determinant_identity_residual(G: MomentMatrix, fact: Factorization) -> float:
    """Max relative gap between ``det G^{[l]}`` and ``prod_{k<l} det H_k``."""
    worst = 0.0
    prod = 1.0 + 0j
    for l in range(1, fact.levels + 1):
        prod *= fact.det_H(l - 1)
        d = np.linalg.det(G.truncation(l))
        worst = max(worst, abs(d - prod) / max(abs(d), 1e-300))
    return float(worst)

"""Truncated moment matrices and their bordered truncations.

The moment matrix of level ``K`` is indexed by the shells ``0..K-1``, with
``G[alpha, alpha'] = c_{alpha' - alpha}``.  ``G^{[k]}`` is its leading
``N_{k-1} x N_{k-1}`` block (shells ``0..k-1``).
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .laurent import LaurentPolynomial
from .longilex import LongilexBasis
from .measure import FourierOracle
from . import spectral


class MomentMatrix:
    """Dense moment matrix with shell-block access."""

    def __init__(self, data: np.ndarray, basis: LongilexBasis, oracle: FourierOracle | None = None):
        if data.shape != (basis.size, basis.size):
            raise ValueError("matrix shape does not match the basis")
        self.data = data
        self.basis = basis
        self.oracle = oracle

    @property
    def level(self) -> int:
        """Number of shells covered."""
        return self.basis.K + 1

    @property
    def D(self) -> int:
        return self.basis.D

    def block(self, k: int, l: int) -> np.ndarray:
        return self.data[self.basis.block(k), self.basis.block(l)]

    def truncation(self, k: int) -> np.ndarray:
        """``G^{[k]}``: shells ``0..k-1``."""
        if not 0 <= k <= self.level:
            raise IndexError(f"truncation level {k} outside 0..{self.level}")
        s = self.basis.upto(k)
        return self.data[s, s]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "level": self.level,
            "offsets": self.basis.offsets.tolist(),
            "re": self.data.real.tolist(),
            "im": self.data.imag.tolist(),
        }

    def to_csv(self) -> str:
        """Rows ``i, j, shell_i, shell_j, re, im`` for the nonzero entries."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "shell_i", "shell_j", "re", "im"])
        for i, j in zip(*np.nonzero(self.data)):
            v = self.data[i, j]
            w.writerow([int(i), int(j), int(self.basis.shell_of[i]), int(self.basis.shell_of[j]), format(float(v.real), ".17g"), format(float(v.imag), ".17g")])
        return buf.getvalue()


def build_moment(oracle: FourierOracle, basis: LongilexBasis) -> MomentMatrix:
    """Moment matrix on every shell of ``basis``."""
    if oracle.D != basis.D:
        raise ValueError(f"oracle has D={oracle.D}, basis has D={basis.D}")
    E = basis.exponents
    diffs = E[None, :, :] - E[:, None, :]
    c = oracle.coeffs(diffs.reshape(-1, basis.D)).reshape(basis.size, basis.size)
    return MomentMatrix(np.asarray(c, dtype=complex), basis, oracle)


def moment_matrix(oracle: FourierOracle, K: int) -> MomentMatrix:
    """Moment matrix of level ``K`` (shells ``0..K-1``)."""
    if K < 1:
        raise ValueError("level must be at least 1")
    return build_moment(oracle, LongilexBasis(oracle.D, K - 1))


def _rows_cols(G: MomentMatrix, row_shells, col_shells) -> np.ndarray:
    b = G.basis
    r = np.concatenate([np.arange(b.offsets[s], b.offsets[s + 1]) for s in row_shells]) if row_shells else np.zeros(0, int)
    c = np.concatenate([np.arange(b.offsets[s], b.offsets[s + 1]) for s in col_shells]) if col_shells else np.zeros(0, int)
    return G.data[np.ix_(r, c)]


def _check_bordered(G: MomentMatrix, k: int, l: int):
    if not (1 <= k <= l < G.level):
        raise IndexError(f"need 1 <= k <= l < {G.level}, got k={k}, l={l}")


def bordered_row_truncation(G: MomentMatrix, k: int, l: int) -> np.ndarray:
    """``G^{[k]}_l``: rows from shells ``0..k-2`` and ``l``, columns from shells ``0..k-1``."""
    _check_bordered(G, k, l)
    return _rows_cols(G, list(range(k - 1)) + [l], list(range(k)))


def bordered_col_truncation(G: MomentMatrix, k: int, l: int) -> np.ndarray:
    """Column analogue: rows ``0..k-1``, columns from shells ``0..k-2`` and ``l``."""
    _check_bordered(G, k, l)
    return _rows_cols(G, list(range(k)), list(range(k - 1)) + [l])


def hermitian_residual(G: MomentMatrix) -> float:
    return float(np.abs(G.data - G.data.conj().T).max())


def persymmetry_residual(G: MomentMatrix) -> float:
    """``max |eta G eta - G^T|``."""
    E = spectral.eta(G.basis).toarray()
    return float(np.abs(E @ G.data @ E - G.data.T).max())


def check_string_equation(G: MomentMatrix, L) -> float:
    """Interior residual of ``L(Upsilon) G - G L(Upsilon)``.

    ``L`` is a :class:`LaurentPolynomial` or a multi-index (a single shift).
    Rows and columns are restricted to shells ``<= K - 1 - longitude(L)``.
    """
    if not isinstance(L, LaurentPolynomial):
        L = LaurentPolynomial.monomial(tuple(int(a) for a in L))
    ell = L.longitude()
    if ell > G.basis.K:
        raise ValueError(f"operator longitude {ell} too wide for level {G.level}")
    LU = spectral.laurent_of_upsilon(G.basis, L)
    R = LU @ G.data - G.data @ LU
    s = spectral.interior(G.basis, ell)
    return float(np.abs(R[s, s]).max()) if R[s, s].size else 0.0


def leading_minor_report(G: MomentMatrix) -> list:
    """For each ``k``: smallest eigenvalue (Hermitian case) or singular value and condition of ``G^{[k]}``."""
    out = []
    herm = hermitian_residual(G) <= 1e-12 * max(1.0, np.abs(G.data).max())
    for k in range(1, G.level + 1):
        T = G.truncation(k)
        sv = np.linalg.svd(T, compute_uv=False)
        rec = {"k": k, "size": T.shape[0], "cond": float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")}
        if herm:
            rec["min_eig"] = float(np.linalg.eigvalsh((T + T.conj().T) / 2)[0])
        out.append(rec)
    return out


def dumps(G: MomentMatrix) -> str:
    return json.dumps(G.to_json())

"""Multi-index shells of fixed longitude and the longilex ordering.

A multi-index ``alpha`` in Z^D has longitude ``|alpha| = sum |alpha_a|``.
The shell ``[k]`` collects every multi-index of longitude ``k``; shells are
ordered by longitude and, inside a shell, by plain ascending lexicographic
comparison of the signed integer vectors.
"""

from __future__ import annotations

import json
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

MultiIndex = tuple


def longitude(alpha: Iterable[int]) -> int:
    return int(sum(abs(int(a)) for a in alpha))


def shell_size(D: int, k: int) -> int:
    """Number of multi-indices in Z^D with longitude ``k`` (closed formula)."""
    if D < 1 or k < 0:
        raise ValueError("need D >= 1 and k >= 0")
    if k == 0:
        return 1
    return sum(2**j * comb(D, j) * comb(k - 1, j - 1) for j in range(1, min(k, D) + 1))


def _compositions(D: int, k: int):
    # all vectors of D nonnegative integers summing to k
    if D == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(D - 1, k - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enumerate_shell(D: int, k: int) -> tuple:
    """Shell ``[k]`` of Z^D as a tuple of integer tuples in ascending lex order."""
    if D < 1 or k < 0:
        raise ValueError("need D >= 1 and k >= 0")
    out = set()
    for mags in _compositions(D, k):
        nz = [i for i, m in enumerate(mags) if m]
        for signs in range(2 ** len(nz)):
            v = list(mags)
            for bit, i in enumerate(nz):
                if signs >> bit & 1:
                    v[i] = -v[i]
            out.add(tuple(v))
    return tuple(sorted(out))


class LongilexBasis:
    """Ordered monomial basis made of the shells ``[0], [1], ..., [K]``.

    ``offsets[k]`` is the global index of the first element of shell ``k`` and
    ``offsets[K + 1]`` is the total size, so ``N_k = offsets[k + 1]``.
    """

    def __init__(self, D: int, K: int):
        if D < 1 or K < 0:
            raise ValueError("need D >= 1 and K >= 0")
        self.D = int(D)
        self.K = int(K)
        self.shells = [list(enumerate_shell(self.D, k)) for k in range(self.K + 1)]
        sizes = [len(s) for s in self.shells]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        self.indices = [a for s in self.shells for a in s]
        self.index_of = {a: i for i, a in enumerate(self.indices)}
        self.exponents = np.array(self.indices, dtype=int).reshape(-1, self.D)
        self.shell_of = np.repeat(np.arange(self.K + 1), sizes)

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def shell_len(self, k: int) -> int:
        return int(self.offsets[k + 1] - self.offsets[k])

    def block(self, k: int) -> slice:
        return slice(int(self.offsets[k]), int(self.offsets[k + 1]))

    def upto(self, k: int) -> slice:
        """Indices of shells ``0..k-1`` (the leading ``N_{k-1}`` entries)."""
        return slice(0, int(self.offsets[k]))

    def N(self, k: int) -> int:
        """Cumulative dimension ``N_k`` of shells ``0..k`` (``N_{-1} = 0``)."""
        return 0 if k < 0 else int(self.offsets[k + 1])

    def position(self, alpha: Sequence[int]) -> tuple:
        i = self.index_of[tuple(int(a) for a in alpha)]
        k = int(self.shell_of[i])
        return k, i - int(self.offsets[k])

    def chi(self, z) -> np.ndarray:
        return chi_eval(self, z)

    def to_json(self) -> dict:
        return {"D": self.D, "K": self.K, "shells": [[list(a) for a in s] for s in self.shells]}

    @classmethod
    def from_json(cls, data) -> "LongilexBasis":
        if isinstance(data, str):
            data = json.loads(data)
        basis = cls(int(data["D"]), int(data["K"]))
        stored = [[tuple(a) for a in s] for s in data.get("shells", basis.shells)]
        if stored != basis.shells:
            raise ValueError("stored shells do not follow the longilex order")
        return basis

    def __repr__(self) -> str:
        return f"LongilexBasis(D={self.D}, K={self.K}, size={self.size})"


def monomials(exponents: np.ndarray, z) -> np.ndarray:
    """Evaluate ``z**alpha`` for each row of ``exponents``.

    ``z`` has shape ``(..., D)``; the result has shape ``(..., n_exponents)``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("monomial evaluation needs nonzero coordinates")
    # integer powers by repeated products, one table per coordinate
    out = np.ones(z.shape[:-1] + (exponents.shape[0],), dtype=complex)
    for a in range(exponents.shape[1]):
        col = exponents[:, a]
        lo, hi = int(col.min(initial=0)), int(col.max(initial=0))
        za = z[..., a]
        powers = {0: np.ones_like(za)}
        for p in range(1, hi + 1):
            powers[p] = powers[p - 1] * za
        inv = 1.0 / za
        for p in range(1, -lo + 1):
            powers[-p] = powers[-p + 1] * inv
        out *= np.stack([powers[int(c)] for c in col], axis=-1)
    return out


def chi_eval(basis: LongilexBasis, z) -> np.ndarray:
    """Monomial vector ``chi(z)`` of length ``N_K`` in longilex order."""
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != basis.D:
        raise ValueError(f"point has dimension {z.shape[-1]}, basis has D={basis.D}")
    return monomials(basis.exponents, z)

"""Finite Laurent polynomials in D variables, longitude and nicety.

A polynomial is stored as a mapping ``alpha -> coefficient`` with no zero
entries.  Nicety is decided on the integer support: ``L`` is nice when every
closed sign orthant contains a support point of maximal longitude.  That is
the same as asking, for each sign vector ``u`` in {+1, -1}^D, that the linear
functional ``u . alpha`` reaches ``longitude(L)`` on the support.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .longilex import longitude as _alpha_longitude
from .longilex import monomials

PRUNE_TOL = 1e-14


class LaurentPolynomial:
    __slots__ = ("D", "terms")

    def __init__(self, D: int, terms: Mapping | None = None, prune: float | None = None):
        self.D = int(D)
        clean = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.D:
                raise ValueError(f"multi-index {alpha} does not have length {self.D}")
            c = complex(c)
            if c == 0 or (prune is not None and abs(c) < prune):
                continue
            clean[alpha] = clean.get(alpha, 0) + c
        self.terms = {a: c for a, c in clean.items() if c != 0}

    # constructors
    @classmethod
    def constant(cls, D: int, c=1.0) -> "LaurentPolynomial":
        return cls(D, {(0,) * D: c})

    @classmethod
    def monomial(cls, alpha, c=1.0) -> "LaurentPolynomial":
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: c})

    @classmethod
    def variable(cls, D: int, a: int, power: int = 1) -> "LaurentPolynomial":
        """``z_a ** power`` with 1-based variable index ``a``."""
        alpha = [0] * D
        alpha[a - 1] = power
        return cls(D, {tuple(alpha): 1.0})

    # algebra
    def _check(self, other: "LaurentPolynomial"):
        if other.D != self.D:
            raise ValueError(f"dimension mismatch: {self.D} vs {other.D}")

    def _coerce(self, other):
        if isinstance(other, LaurentPolynomial):
            self._check(other)
            return other
        return LaurentPolynomial.constant(self.D, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return LaurentPolynomial(self.D, out, prune=PRUNE_TOL)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.D, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return LaurentPolynomial(self.D, {a: c * other for a, c in self.terms.items()})
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, m: int):
        if m < 0:
            raise ValueError("only nonnegative powers")
        out = LaurentPolynomial.constant(self.D)
        for _ in range(m):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.D == other.D and self.terms == other.terms

    def __hash__(self):
        return hash((self.D, frozenset(self.terms.items())))

    def close_to(self, other: "LaurentPolynomial", tol=1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= tol for c in diff.terms.values())

    def shift(self, alpha) -> "LaurentPolynomial":
        """Multiply by the monomial ``z**alpha``."""
        alpha = tuple(int(a) for a in alpha)
        return LaurentPolynomial(
            self.D, {tuple(x + y for x, y in zip(a, alpha)): c for a, c in self.terms.items()}
        )

    def adjoint(self) -> "LaurentPolynomial":
        """``conj(L)(z^{-1})``: the polynomial whose torus values are ``conj(L)``."""
        return LaurentPolynomial(
            self.D, {tuple(-x for x in a): np.conj(c) for a, c in self.terms.items()}
        )

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def support(self) -> np.ndarray:
        return np.array(list(self.terms), dtype=int).reshape(-1, self.D)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array(list(self.terms.values()), dtype=complex)

    def coeff(self, alpha) -> complex:
        return self.terms.get(tuple(int(a) for a in alpha), 0j)

    def longitude(self) -> int:
        return longitude(self)

    def is_torus_real(self, tol: float = 0.0) -> bool:
        for a, c in self.terms.items():
            partner = self.terms.get(tuple(-x for x in a), 0j)
            if abs(partner - np.conj(c)) > tol:
                return False
        return True

    def evaluate(self, z) -> np.ndarray:
        return evaluate(self, z)

    __call__ = evaluate

    def on_torus(self, theta) -> np.ndarray:
        """Values at ``z = exp(i theta)``; ``theta`` has shape ``(..., D)``."""
        return self.evaluate(np.exp(1j * np.asarray(theta, dtype=float)))

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "terms": [
                {"alpha": list(a), "re": float(c.real), "im": float(c.imag)}
                for a, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data) -> "LaurentPolynomial":
        if isinstance(data, str):
            data = json.loads(data)
        terms = {}
        for t in data["terms"]:
            a = tuple(int(x) for x in t["alpha"])
            terms[a] = terms.get(a, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        D = int(data["D"]) if "D" in data else len(next(iter(terms)))
        return cls(D, terms)

    def __repr__(self) -> str:
        if not self.terms:
            return f"LaurentPolynomial(D={self.D}, 0)"
        parts = []
        for a, c in sorted(self.terms.items()):
            mono = "*".join(f"z{i + 1}^{e}" if e != 1 else f"z{i + 1}" for i, e in enumerate(a) if e)
            parts.append(f"({c:.6g})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def multiply(L1: LaurentPolynomial, L2: LaurentPolynomial) -> LaurentPolynomial:
    """Coefficient convolution; products below 1e-14 in magnitude are dropped."""
    if L1.D != L2.D:
        raise ValueError(f"dimension mismatch: {L1.D} vs {L2.D}")
    out: dict = {}
    for a, c in L1.terms.items():
        for b, d in L2.terms.items():
            key = tuple(x + y for x, y in zip(a, b))
            out[key] = out.get(key, 0) + c * d
    return LaurentPolynomial(L1.D, out, prune=PRUNE_TOL)


def longitude(L: LaurentPolynomial) -> int:
    if L.is_zero():
        raise ValueError("the zero polynomial has no longitude")
    return max(_alpha_longitude(a) for a in L.terms)


def evaluate(L: LaurentPolynomial, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != L.D:
        raise ValueError(f"point has dimension {z.shape[-1]}, polynomial has D={L.D}")
    if L.is_zero():
        return np.zeros(z.shape[:-1], dtype=complex)
    vals = monomials(L.support, z) @ L.coefficients
    return vals[()] if vals.ndim == 0 else vals


def sign_vectors(D: int):
    """Pairs ``(sigma, u)``: ``sigma`` the set of negative axes (1-based), ``u`` in {+1,-1}^D."""
    for bits in itertools.product((1, -1), repeat=D):
        u = np.array(bits, dtype=int)
        sigma = tuple(i + 1 for i in range(D) if bits[i] < 0)
        yield sigma, u


def sign_pattern(sigma, D: int) -> str:
    """``"+-"``-style label of the orthant whose negative axes are ``sigma`` (1-based)."""
    return "".join("-" if i + 1 in sigma else "+" for i in range(D))


@dataclass
class NicetyReport:
    nice: bool
    longitude: int
    witnesses: dict = field(default_factory=dict)
    deficient_orthants: list = field(default_factory=list)
    witnesses_dim: int = 1

    def __bool__(self) -> bool:
        return self.nice

    @property
    def deficient_orthant(self):
        return self.deficient_orthants[0] if self.deficient_orthants else None

    def to_json(self) -> dict:
        return {
            "nice": self.nice,
            "longitude": self.longitude,
            "witnesses": {",".join(map(str, s)) or "-": list(w) for s, w in self.witnesses.items()},
            "deficient_orthant": list(self.deficient_orthant) if self.deficient_orthant is not None else None,
            "deficient_orthants": [list(s) for s in self.deficient_orthants],
            "deficient_signs": [sign_pattern(s, self.witnesses_dim) for s in self.deficient_orthants],
        }


def is_nice(L: LaurentPolynomial) -> NicetyReport:
    """Orthant scan of the support.

    For each sign pattern (negative axes ``sigma``) look for a support point of
    maximal longitude lying in the closed orthant; coordinates equal to zero are
    compatible with either sign.  The witness is that support point.
    """
    ell = longitude(L)
    supp = L.support
    top = supp[np.abs(supp).sum(axis=1) == ell]
    witnesses, deficient = {}, []
    for sigma, u in sign_vectors(L.D):
        inside = np.all(top * u >= 0, axis=1)
        if inside.any():
            witnesses[sigma] = tuple(int(x) for x in top[np.argmax(inside)])
        else:
            deficient.append(sigma)
    return NicetyReport(not deficient, ell, witnesses, deficient, L.D)


def nicety_oracle(L: LaurentPolynomial) -> bool:
    """Independent nicety check through longitude additivity on test shifts.

    With ``c = longitude(L) + 1`` every support point ``alpha`` satisfies
    ``|alpha + c u| = c D + u . alpha``, so multiplying by ``z^{c u}`` reaches the
    additive longitude ``c D + longitude(L)`` exactly when some support point
    attains ``u . alpha = longitude(L)``.
    """
    ell = longitude(L)
    c = ell + 1
    for _, u in sign_vectors(L.D):
        shifted = multiply(LaurentPolynomial.monomial(tuple(c * u)), L)
        if longitude(shifted) != c * L.D + ell:
            return False
    return True


def parse_poly(text: str, D: int | None = None) -> LaurentPolynomial:
    """Parse a small human syntax like ``"z1 + z1^-1 + 2*z1*z2^-1 + 5"``.

    Terms are separated by ``+``/``-``; each term is an optional numeric or
    ``i``-suffixed complex coefficient times ``z<a>^<e>`` factors.
    """
    import re

    text = text.replace(" ", "").replace("**", "^")
    if D is None:
        found = [int(m) for m in re.findall(r"z(\d+)", text)]
        D = max(found) if found else 1
    tokens = re.findall(r"[+-]?[^+-]+(?:\^-?\d+[^+-]*)*", text.replace("^-", "^~"))
    terms: dict = {}
    for tok in tokens:
        tok = tok.replace("^~", "^-")
        sign = -1.0 if tok.startswith("-") else 1.0
        tok = tok.lstrip("+-")
        coeff: complex = 1.0
        alpha = [0] * D
        for factor in filter(None, tok.split("*")):
            m = re.fullmatch(r"z(\d+)(?:\^(-?\d+))?", factor)
            if m:
                alpha[int(m.group(1)) - 1] += int(m.group(2) or 1)
            elif factor.endswith(("i", "j")):
                coeff *= complex(factor[:-1] + "j" if factor[:-1] else "1j")
            else:
                coeff *= complex(factor)
        key = tuple(alpha)
        terms[key] = terms.get(key, 0) + sign * coeff
    return LaurentPolynomial(D, terms)

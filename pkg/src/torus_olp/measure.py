"""Measures on the torus T^D, represented by their Fourier coefficients.

Normalization used throughout the package::

    c_alpha = (2 pi)^{-D} * integral of exp(-i alpha.theta) dmu(theta)

so the Haar oracle has ``c_0 = 1`` and every other coefficient zero, and the
moment matrix of the Haar measure is the identity.  A weight ``w(theta)`` means
``dmu = w(theta) dtheta / (2 pi)^D``.
"""

from __future__ import annotations

import json
from typing import Callable, Mapping, Sequence

import numpy as np

from .laurent import LaurentPolynomial


class BandError(ValueError):
    """A coefficient was requested outside the range an oracle can resolve."""


class FourierOracle:
    """Base class: subclasses implement ``_coeffs`` on an integer array of shape (n, D)."""

    D: int
    is_real: bool = False
    claims_positive: bool = False
    #: largest per-axis |alpha_a| that can be served, or None when unlimited
    band: int | None = None
    #: Laurent polynomial weight when the measure is ``L * Haar`` (banded moments)
    laurent_weight: LaurentPolynomial | None = None

    def coeffs(self, alphas) -> np.ndarray:
        alphas = np.asarray(alphas, dtype=int).reshape(-1, self.D)
        if self.band is not None and alphas.size and np.abs(alphas).max() > self.band:
            raise BandError(
                f"requested |alpha_a| = {int(np.abs(alphas).max())} beyond oracle band {self.band}"
            )
        return self._coeffs(alphas)

    def coeff(self, alpha) -> complex:
        return complex(self.coeffs(np.asarray(alpha, dtype=int).reshape(1, self.D))[0])

    def weight(self, theta) -> np.ndarray:
        """Density ``w(theta)`` with respect to ``dtheta / (2 pi)^D``."""
        raise NotImplementedError(f"{type(self).__name__} has no pointwise weight")

    def _coeffs(self, alphas: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class HaarOracle(FourierOracle):
    is_real = True
    claims_positive = True

    def __init__(self, D: int):
        if D < 1:
            raise ValueError("need D >= 1")
        self.D = int(D)
        self.laurent_weight = LaurentPolynomial.constant(self.D)

    def _coeffs(self, alphas):
        return np.all(alphas == 0, axis=1).astype(complex)

    def weight(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.ones(theta.shape[:-1])

    def __repr__(self):
        return f"HaarOracle(D={self.D})"


def haar_oracle(D: int) -> HaarOracle:
    return HaarOracle(D)


class PolynomialWeightOracle(FourierOracle):
    """``L * dmu`` for a Laurent polynomial ``L``: coefficients by exact convolution."""

    def __init__(self, base: FourierOracle, L: LaurentPolynomial, claims_positive: bool | None = None):
        if L.D != base.D:
            raise ValueError(f"dimension mismatch: base D={base.D}, L has D={L.D}")
        self.D = base.D
        self.base = base
        self.L = L
        self.is_real = base.is_real and L.is_torus_real(tol=1e-14)
        if claims_positive is None:
            claims_positive = False
        self.claims_positive = bool(claims_positive)
        shift = int(np.abs(L.support).max()) if not L.is_zero() else 0
        self.band = None if base.band is None else base.band - shift
        self.laurent_weight = (
            base.laurent_weight * L if base.laurent_weight is not None else None
        )

    def _coeffs(self, alphas):
        out = np.zeros(len(alphas), dtype=complex)
        for beta, c in self.L.terms.items():
            out += c * self.base.coeffs(alphas - np.asarray(beta, dtype=int))
        return out

    def weight(self, theta):
        return self.L.on_torus(theta) * self.base.weight(theta)

    def __repr__(self):
        return f"PolynomialWeightOracle({self.base!r}, {self.L!r})"


def polynomial_weight_oracle(base: FourierOracle, L: LaurentPolynomial, **kw) -> PolynomialWeightOracle:
    return PolynomialWeightOracle(base, L, **kw)


class GridOracle(FourierOracle):
    """Tensor trapezoidal rule on an ``M^D`` grid, computed with one FFT.

    Exact up to roundoff for trigonometric polynomials of per-axis degree below
    ``M / 2``; coefficients with ``|alpha_a| > (M - 1) // 2`` alias and are refused.
    """

    def __init__(
        self,
        weight: Callable[[np.ndarray], np.ndarray],
        D: int,
        M: int,
        is_real: bool = False,
        claims_positive: bool = False,
    ):
        if M < 2:
            raise ValueError("grid size must be at least 2")
        self.D = int(D)
        self.M = int(M)
        self._weight = weight
        self.is_real = bool(is_real)
        self.claims_positive = bool(claims_positive)
        self.band = (self.M - 1) // 2
        axis = 2 * np.pi * np.arange(self.M) / self.M
        theta = np.stack(np.meshgrid(*([axis] * self.D), indexing="ij"), axis=-1)
        samples = np.asarray(weight(theta), dtype=complex)
        # numpy's forward FFT carries exp(-2 pi i j n / M), matching exp(-i alpha.theta)
        self.table = np.fft.fftn(samples) / self.M**self.D

    def _coeffs(self, alphas):
        idx = tuple((alphas % self.M).T)
        return self.table[idx]

    def weight(self, theta):
        return np.asarray(self._weight(np.asarray(theta, dtype=float)))

    def __repr__(self):
        return f"GridOracle(D={self.D}, M={self.M})"


def grid_oracle(weight, D: int, M: int, **kw) -> GridOracle:
    return GridOracle(weight, D, M, **kw)


def default_grid_size(K: int) -> int:
    return 4 * K + 9


class SeriesOracle(FourierOracle):
    """Oracle backed by a closed-form coefficient function ``alphas -> c``."""

    def __init__(self, D, coeff_fn, weight_fn=None, is_real=False, claims_positive=False):
        self.D = int(D)
        self._fn = coeff_fn
        self._weight = weight_fn
        self.is_real = is_real
        self.claims_positive = claims_positive

    def _coeffs(self, alphas):
        return np.asarray(self._fn(alphas), dtype=complex)

    def weight(self, theta):
        if self._weight is None:
            return super().weight(theta)
        return np.asarray(self._weight(np.asarray(theta, dtype=float)))


def bernstein_szego_oracle(a: float = 0.5) -> SeriesOracle:
    """D = 1 weight ``|1 - a e^{i theta}|^{-2}`` with ``c_n = a^{|n|} / (1 - a^2)``."""
    if not 0 <= abs(a) < 1:
        raise ValueError("need |a| < 1")
    return SeriesOracle(
        1,
        lambda al: a ** np.abs(al[:, 0]) / (1 - a * a),
        lambda th: 1.0 / np.abs(1 - a * np.exp(1j * th[..., 0])) ** 2,
        is_real=True,
        claims_positive=True,
    )


class DeformedOracle(FourierOracle):
    """Base measure times ``exp(sum_alpha t_alpha z^alpha) * prod_i L_i(z)^{m_i}``.

    With no continuous times the discrete part is applied by exact repeated
    convolution.  Otherwise the combined weight is sampled on a grid, which
    requires the base oracle to expose a pointwise weight.
    """

    def __init__(
        self,
        base: FourierOracle,
        times: Mapping | None = None,
        discrete_steps: Sequence = (),
        M: int | None = None,
        K: int | None = None,
    ):
        self.D = base.D
        self.base = base
        self.times = {tuple(int(x) for x in a): complex(t) for a, t in (times or {}).items() if t != 0}
        self.discrete_steps = [(L, int(m)) for L, m in discrete_steps]
        for L, m in self.discrete_steps:
            if m < 0:
                raise ValueError("discrete step powers must be nonnegative")
            if L.D != self.D:
                raise ValueError("discrete step polynomial has the wrong dimension")
        real_times = all(
            abs(self.times.get(tuple(-x for x in a), 0) - np.conj(t)) <= 1e-15 for a, t in self.times.items()
        )
        real_steps = all(L.is_torus_real(tol=1e-14) for L, _ in self.discrete_steps)
        self.is_real = base.is_real and real_times and real_steps
        self.claims_positive = base.claims_positive and self.is_real and not self.discrete_steps

        multiplier = LaurentPolynomial.constant(self.D)
        for L, m in self.discrete_steps:
            multiplier = multiplier * (L**m)
        self.multiplier = multiplier

        if not self.times:
            self._impl = base if multiplier == LaurentPolynomial.constant(self.D) else PolynomialWeightOracle(base, multiplier)
            self.M = None
        else:
            if M is None:
                M = max(default_grid_size(K or 4), 33)
            self.M = int(M)
            self._impl = GridOracle(self.weight, self.D, self.M, is_real=self.is_real)
        self.band = self._impl.band
        self.laurent_weight = self._impl.laurent_weight

    def exponent(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape[:-1], dtype=complex)
        for a, t in self.times.items():
            out = out + t * np.exp(1j * (theta @ np.asarray(a, dtype=float)))
        return out

    def weight(self, theta):
        theta = np.asarray(theta, dtype=float)
        w = self.base.weight(theta) * np.exp(self.exponent(theta))
        if not self.multiplier.is_zero():
            w = w * self.multiplier.on_torus(theta)
        return w

    def _coeffs(self, alphas):
        return self._impl.coeffs(alphas)

    def __repr__(self):
        return f"DeformedOracle(times={self.times}, steps={len(self.discrete_steps)})"


def deformed_oracle(base, times=None, discrete_steps=(), **kw) -> DeformedOracle:
    return DeformedOracle(base, times, discrete_steps, **kw)


def oracle_from_json(desc, D: int | None = None, K: int | None = None) -> FourierOracle:
    """Build an oracle from a weight description.

    Accepted shapes: ``{"laurent": poly}`` (Laurent weight on Haar), or
    ``{"exp_times": [{"alpha", "re", "im"}...], "discrete": [{"L": poly, "m": int}...]}``,
    optionally with ``"D"`` and ``"grid": M``.
    """
    if isinstance(desc, str):
        desc = json.loads(desc)
    if "laurent" in desc:
        L = LaurentPolynomial.from_json(desc["laurent"])
        base = HaarOracle(L.D)
        return PolynomialWeightOracle(base, L, claims_positive=bool(desc.get("positive", False)))
    if "exp_times" in desc or "discrete" in desc:
        steps = [(LaurentPolynomial.from_json(s["L"]), int(s.get("m", 1))) for s in desc.get("discrete", [])]
        times = {}
        for t in desc.get("exp_times", []):
            a = tuple(int(x) for x in t["alpha"])
            times[a] = times.get(a, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        dim = desc.get("D", D)
        if dim is None:
            if times:
                dim = len(next(iter(times)))
            elif steps:
                dim = steps[0][0].D
            else:
                raise ValueError("cannot infer D from an empty weight description")
        return DeformedOracle(HaarOracle(int(dim)), times, steps, M=desc.get("grid"), K=K)
    if desc.get("haar"):
        return HaarOracle(int(desc.get("D", D or 1)))
    raise ValueError("weight description needs a 'laurent', 'exp_times' or 'discrete' key")

"""Continuous and discrete Toda-type flows on the factorization data.

Continuous flows deform the measure by ``exp(sum_alpha t_alpha z^alpha)``;
every time point is refactorized from scratch and derivatives come from
central differences.  Discrete flows multiply the measure by degree-one
factors ``L_{n_a}(z) - q_a`` with exact convolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .gaussborel import Factorization, factorize
from .laurent import LaurentPolynomial
from .longilex import LongilexBasis, longitude
from .measure import DeformedOracle, FourierOracle, default_grid_size
from .moments import build_moment
from .opbasis import eval_family
from . import spectral


def axis_shift(D: int, a: int) -> tuple:
    """Multi-index ``sign(a) e_|a|`` for ``a`` in ``+-1..+-D``."""
    if a == 0 or abs(a) > D:
        raise ValueError(f"axis label {a} outside +-1..+-{D}")
    e = [0] * D
    e[abs(a) - 1] = 1 if a > 0 else -1
    return tuple(e)


def _key(times: dict) -> tuple:
    return tuple(sorted((a, complex(t)) for a, t in times.items() if t != 0))


class ContinuousFlow:
    """Factorizations of ``exp(t(z)) dmu`` on a fixed basis, cached by time."""

    def __init__(self, base: FourierOracle, basis: LongilexBasis, times: dict | None = None, M: int | None = None):
        if base.D != basis.D:
            raise ValueError("dimension mismatch between base measure and basis")
        self.base = base
        self.basis = basis
        self.times = {tuple(a): complex(t) for a, t in (times or {}).items()}
        self.M = M if M is not None else max(default_grid_size(basis.K + 1), 33)
        self._cache: dict = {}

    @property
    def D(self) -> int:
        return self.basis.D

    def at(self, shifts: dict | None = None) -> Factorization:
        """Factorization at ``times + shifts``."""
        t = dict(self.times)
        for a, dt in (shifts or {}).items():
            a = tuple(a)
            t[a] = t.get(a, 0) + dt
        key = _key(t)
        if key not in self._cache:
            oracle = DeformedOracle(self.base, dict(key), M=self.M) if key else self.base
            self._cache[key] = factorize(build_moment(oracle, self.basis))
        return self._cache[key]

    def derivative(self, getter, alpha, h: float):
        """Central difference of ``getter(factorization)`` along ``t_alpha``."""
        alpha = tuple(alpha)
        return (getter(self.at({alpha: h})) - getter(self.at({alpha: -h}))) / (2 * h)

    def second_derivative(self, getter, alpha, beta, h: float):
        """Four-point mixed stencil along ``t_alpha`` and ``t_beta``."""
        alpha, beta = tuple(alpha), tuple(beta)

        def f(sa, sb):
            shifts: dict = {}
            shifts[alpha] = shifts.get(alpha, 0) + sa * h
            shifts[beta] = shifts.get(beta, 0) + sb * h
            return getter(self.at(shifts))

        return (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4 * h * h)


def _ublock(basis, alpha, i, j):
    U = spectral.upsilon_power(basis, alpha).toarray()
    return U[basis.block(i), basis.block(j)]


def first_order_residuals(flow: ContinuousFlow, a: int, k: int, h: float = 1e-4) -> dict:
    """Residuals of the first-order laws for ``H_k`` and ``beta_k`` along ``t_a``.

    ``dH_k H_k^{-1} = beta_k U_{k-1,k} - U_{k,k+1} beta_{k+1}`` and
    ``d beta_k = -H_k U_{k,k-1} H_{k-1}^{-1}`` with ``U`` the shift for ``a``.
    """
    b = flow.basis
    alpha = axis_shift(b.D, a)
    if not 0 <= k <= b.K - 1:
        raise IndexError(f"need 0 <= k <= {b.K - 1}")
    f0 = flow.at()
    dH = flow.derivative(lambda f: f.H_block(k), alpha, h)
    lhs = dH @ np.linalg.inv(f0.H_block(k))
    rhs = -_ublock(b, alpha, k, k + 1) @ f0.beta(k + 1)
    if k >= 1:
        rhs = rhs + f0.beta(k) @ _ublock(b, alpha, k - 1, k)
    out = {"H": float(np.abs(lhs - rhs).max())}
    if k >= 1:
        dbeta = flow.derivative(lambda f: f.beta(k), alpha, h)
        pred = -f0.H_block(k) @ _ublock(b, alpha, k, k - 1) @ np.linalg.inv(f0.H_block(k - 1))
        out["beta"] = float(np.abs(dbeta - pred).max())
    return out


def toda_equation_residual(flow: ContinuousFlow, a: int, b_: int, k: int, h: float = 1e-3) -> float:
    """Second-order Toda equation for ``H_k``:

    ``d_b(d_a H_k H_k^{-1}) = U^a_{k,k+1} H_{k+1} U^b_{k+1,k} H_k^{-1} - H_k U^b_{k,k-1} H_{k-1}^{-1} U^a_{k-1,k}``.
    The left side is ``(d_a d_b H) H^{-1} - d_a H H^{-1} d_b H H^{-1}``.
    """
    basis = flow.basis
    if not 1 <= k <= basis.K - 1:
        raise IndexError(f"need 1 <= k <= {basis.K - 1}")
    al, be = axis_shift(basis.D, a), axis_shift(basis.D, b_)
    f0 = flow.at()
    Hk = lambda f: f.H_block(k)
    Hinv = np.linalg.inv(f0.H_block(k))
    dab = flow.second_derivative(Hk, al, be, h)
    da = flow.derivative(Hk, al, h)
    db = flow.derivative(Hk, be, h)
    lhs = dab @ Hinv - da @ Hinv @ db @ Hinv
    rhs = (
        _ublock(basis, al, k, k + 1) @ f0.H_block(k + 1) @ _ublock(basis, be, k + 1, k) @ Hinv
        - f0.H_block(k) @ _ublock(basis, be, k, k - 1) @ np.linalg.inv(f0.H_block(k - 1)) @ _ublock(basis, al, k - 1, k)
    )
    return float(np.abs(lhs - rhs).max())


def richardson_order(residual_fn, h: float) -> tuple:
    """``(r(h), r(h/2), observed order)`` for a residual that should scale like ``h^2``."""
    r1, r2 = residual_fn(h), residual_fn(h / 2)
    order = float(np.log2(r1 / r2)) if r2 > 0 and r1 > 0 else float("nan")
    return r1, r2, order


def block_split(A: np.ndarray, basis: LongilexBasis, part: str) -> np.ndarray:
    """Block lower (``'<'``) or block upper including the diagonal (``'>='``) part."""
    mask = basis.shell_of[:, None] > basis.shell_of[None, :]
    if part == "<":
        return np.where(mask, A, 0)
    if part == ">=":
        return np.where(mask, 0, A)
    raise ValueError(part)


def _jacobi(f: Factorization, alpha) -> np.ndarray:
    return spectral.jacobi(f, alpha)


def lax_residual(flow: ContinuousFlow, alpha, alpha2, h: float = 1e-4) -> float:
    """``dJ_alpha / dt_alpha2 - [B_alpha2, J_alpha]`` with ``B = (J)_{>=}``, interior block."""
    b = flow.basis
    margin = longitude(alpha) + longitude(alpha2)
    s = spectral.interior(b, margin)
    f0 = flow.at()
    dJ = flow.derivative(lambda f: _jacobi(f, alpha), alpha2, h)
    J = _jacobi(f0, alpha)
    B = block_split(_jacobi(f0, alpha2), b, ">=")
    R = dJ - (B @ J - J @ B)
    return float(np.abs(R[s, s]).max())


def zero_curvature_residual(flow: ContinuousFlow, alpha, alpha2, h: float = 1e-4) -> float:
    """``dB_alpha/dt_alpha2 - dB_alpha2/dt_alpha + [B_alpha, B_alpha2]`` on the interior."""
    b = flow.basis
    margin = longitude(alpha) + longitude(alpha2)
    s = spectral.interior(b, margin)
    f0 = flow.at()
    B = lambda f, al: block_split(_jacobi(f, al), b, ">=")
    dB1 = flow.derivative(lambda f: B(f, alpha), alpha2, h)
    dB2 = flow.derivative(lambda f: B(f, alpha2), alpha, h)
    B1, B2 = B(f0, alpha), B(f0, alpha2)
    R = dB1 - dB2 + B1 @ B2 - B2 @ B1
    return float(np.abs(R[s, s]).max())


def gelfand_dickey_residual(flow: ContinuousFlow, alpha, h: float = 1e-4) -> float:
    """``(dS/dt_alpha) S^{-1} + (J_alpha)_<`` on the interior."""
    b = flow.basis
    s = spectral.interior(b, longitude(alpha))
    f0 = flow.at()
    dS = flow.derivative(lambda f: f.S, alpha, h)
    R = dS @ f0.inverse("S") + block_split(_jacobi(f0, alpha), b, "<")
    return float(np.abs(R[s, s]).max())


def wave_factorization_residual(flow: ContinuousFlow, extra_shells: int = 12) -> float:
    """``S(t) W_0(t) G(0) = H(t) (S_hat(t)^{-1})^dagger`` with ``W_0 = exp(t(U))``.

    ``W_0 G(0)`` is formed on a basis with ``extra_shells`` more shells and then
    cut back, so truncation of the exponential does not leak into the section.
    """
    b = flow.basis
    big = LongilexBasis(b.D, b.K + extra_shells)
    T = np.zeros((big.size, big.size), dtype=complex)
    for alpha, t in flow.times.items():
        T += t * spectral.upsilon_power(big, alpha).toarray()
    W0 = sla.expm(T)
    G0 = build_moment(flow.base, big).data
    n = b.size
    WG = (W0 @ G0)[:n, :n]
    f = flow.at()
    R = f.S @ WG - f.H @ f.upper
    return float(np.abs(R).max())


# ---------------------------------------------------------------- discrete flows


@dataclass
class DegreeOneFlow:
    """Rows ``n_a`` of ``N`` (each in C^{2D}, ordered like the shell ``[1]``) and shifts ``q_a``."""

    N: np.ndarray
    q: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.N = np.atleast_2d(np.asarray(self.N, dtype=complex))
        self.q = np.atleast_1d(np.asarray(self.q, dtype=complex))
        if self.N.shape[0] != self.q.size:
            raise ValueError("one shift q_a per row n_a is required")

    @property
    def D(self) -> int:
        return self.N.shape[1] // 2

    def factor(self, a: int) -> LaurentPolynomial:
        """``L_{n_a} - q_a`` for the 0-based row ``a``."""
        return spectral.linear_laurent(self.N[a]) - self.q[a]

    def slashed(self, basis: LongilexBasis, a: int) -> np.ndarray:
        return spectral.slashed_matrix(basis, self.N[a])

    @classmethod
    def miwa(cls, N, z) -> "DegreeOneFlow":
        """Shifts ``q = N chi_[1](z)`` so every factor vanishes at ``z``."""
        N = np.asarray(N, dtype=complex)
        D = N.shape[1] // 2
        chi1 = np.array([np.prod(np.asarray(z, dtype=complex) ** np.asarray(e)) for e in spectral.degree_one_exponents(D)])
        return cls(N, N @ chi1, {"z": np.asarray(z, dtype=complex)})


def lattice_factorization(base: FourierOracle, basis: LongilexBasis, flow: DegreeOneFlow, steps) -> Factorization:
    """Factorization of ``prod_a (L_{n_a} - q_a)^{m_a} dmu`` by exact convolution."""
    discrete = [(flow.factor(a), int(m)) for a, m in enumerate(steps) if m]
    oracle = DeformedOracle(base, None, discrete) if discrete else base
    return factorize(build_moment(oracle, basis))


class DiscreteLattice:
    """Factorizations at lattice points ``m``, cached."""

    def __init__(self, base: FourierOracle, basis: LongilexBasis, flow: DegreeOneFlow):
        self.base, self.basis, self.flow = base, basis, flow
        self._cache: dict = {}

    def at(self, steps) -> Factorization:
        key = tuple(int(s) for s in steps)
        if key not in self._cache:
            self._cache[key] = lattice_factorization(self.base, self.basis, self.flow, key)
        return self._cache[key]

    def unit(self, *axes) -> tuple:
        m = [0] * len(self.flow.q)
        for a in axes:
            m[a] += 1
        return tuple(m)


def discrete_step(base: FourierOracle, basis: LongilexBasis, flow: DegreeOneFlow, a: int) -> dict:
    """One step along flow ``a`` with its resolvent blocks and consistency residuals.

    Returns the shifted factorization, ``alpha_k = T_aH_k H_k^{-1}``,
    ``rho_{k+1} = H_{k+1} n_{k+1,k} T_aH_k^{-1}`` and the residuals of
    ``alpha_k = T_a beta_k n_{k-1,k} - n_{k,k+1} beta_{k+1} - q_a`` and
    ``rho_{k+1} = -(T_a beta_{k+1} - beta_{k+1})``.
    """
    lat = DiscreteLattice(base, basis, flow)
    f0 = lat.at(lat.unit())
    f1 = lat.at(lat.unit(a))
    ns = flow.slashed(basis, a)
    blk = lambda i, j: ns[basis.block(i), basis.block(j)]
    qa = flow.q[a]
    alphas, rhos, r_alpha, r_rho = [], [], 0.0, 0.0
    for k in range(basis.K):
        al = f1.H_block(k) @ np.linalg.inv(f0.H_block(k))
        pred = -blk(k, k + 1) @ f0.beta(k + 1) - qa * np.eye(basis.shell_len(k))
        if k >= 1:
            pred = pred + f1.beta(k) @ blk(k - 1, k)
        r_alpha = max(r_alpha, float(np.abs(al - pred).max()))
        rho = f0.H_block(k + 1) @ blk(k + 1, k) @ np.linalg.inv(f1.H_block(k))
        r_rho = max(r_rho, float(np.abs(rho + (f1.beta(k + 1) - f0.beta(k + 1))).max()))
        alphas.append(al)
        rhos.append(rho)
    return {"factorization": f1, "alpha": alphas, "rho": rhos, "alpha_residual": r_alpha, "rho_residual": r_rho}


def step_resolvent(lat: DiscreteLattice, at, a: int) -> np.ndarray:
    """``omega_a`` at lattice point ``at``: ``(T_a S)(nslash_a - q_a)(S)^{-1}``."""
    f = lat.at(at)
    shifted = list(at)
    shifted[a] += 1
    fT = lat.at(tuple(shifted))
    ns = lat.flow.slashed(lat.basis, a) - lat.flow.q[a] * np.eye(lat.basis.size)
    return fT.S @ ns @ f.inverse("S")


def zs_compatibility_residual(lat: DiscreteLattice, a: int, b: int) -> float:
    """``(T_a omega_b) omega_a - (T_b omega_a) omega_b`` on shells ``<= K - 2``."""
    origin = lat.unit()
    wa, wb = step_resolvent(lat, origin, a), step_resolvent(lat, origin, b)
    Ta_wb = step_resolvent(lat, lat.unit(a), b)
    Tb_wa = step_resolvent(lat, lat.unit(b), a)
    s = spectral.interior(lat.basis, 2)
    R = Ta_wb @ wa - Tb_wa @ wb
    scale = max(1.0, float(np.abs((Ta_wb @ wa)[s, s]).max()))
    return float(np.abs(R[s, s]).max() / scale)


def discrete_toda_residual(lat: DiscreteLattice, a: int, b: int, k: int) -> float:
    """Discrete Toda equation for ``alpha_{a,k} = T_aH_k H_k^{-1}``:

    ``T_b alpha_{a,k} - alpha_{a,k} = n^a_{k,k+1} H_{k+1} n^b_{k+1,k} T_bH_k^{-1}
    - T_aH_k n^b_{k,k-1} T_aT_bH_{k-1}^{-1} n^a_{k-1,k}``.
    """
    basis = lat.basis
    if not 1 <= k <= basis.K - 1:
        raise IndexError(f"need 1 <= k <= {basis.K - 1}")
    H = lambda steps, j: lat.at(steps).H_block(j)
    o, ua, ub, uab = lat.unit(), lat.unit(a), lat.unit(b), lat.unit(a, b)
    alpha_a = lambda at: H(tuple(x + y for x, y in zip(at, ua)), k) @ np.linalg.inv(H(at, k))
    lhs = alpha_a(ub) - alpha_a(o)
    na, nb = lat.flow.slashed(basis, a), lat.flow.slashed(basis, b)
    blk = lambda M, i, j: M[basis.block(i), basis.block(j)]
    rhs = (
        blk(na, k, k + 1) @ H(o, k + 1) @ blk(nb, k + 1, k) @ np.linalg.inv(H(ub, k))
        - H(ua, k) @ blk(nb, k, k - 1) @ np.linalg.inv(H(uab, k - 1)) @ blk(na, k - 1, k)
    )
    scale = max(1.0, float(np.abs(lhs).max()))
    return float(np.abs(lhs - rhs).max() / scale)


def stacked_slashed(basis: LongilexBasis, N, k: int) -> np.ndarray:
    """Vertical stack over rows ``n_a`` of ``(nslash_a)_{[k],[k+1]}``."""
    N = np.atleast_2d(np.asarray(N, dtype=complex))
    return np.vstack([spectral.slashed_matrix(basis, n)[basis.block(k), basis.block(k + 1)] for n in N])


def left_inverse(A: np.ndarray) -> np.ndarray:
    """``(A^dagger A)^{-1} A^dagger``; raises if ``A`` lacks full column rank."""
    sv = np.linalg.svd(A, compute_uv=False)
    if sv.size == 0 or sv[-1] <= 1e-12 * sv[0] or A.shape[0] < A.shape[1]:
        raise np.linalg.LinAlgError("stacked shift matrix is not of full column rank")
    Ah = A.conj().T
    return np.linalg.solve(Ah @ A, Ah)


def miwa_polynomials(base: FourierOracle, basis: LongilexBasis, N, z, k: int) -> np.ndarray:
    """``Phi_[k](z)`` from quasi-tau matrices of the ``2D`` one-step perturbations at ``z``.

    ``Phi_{j+1}(z) = -Nslash_j^+ [T H]_j H_j^{-1} Phi_j(z)`` with ``Phi_0 = 1``,
    where ``[T H]_j`` stacks ``T_a H_j`` for the factors ``L_{n_a} - L_{n_a}(z)``.
    """
    flow = DegreeOneFlow.miwa(N, z)
    lat = DiscreteLattice(base, basis, flow)
    f0 = lat.at(lat.unit())
    phi = np.ones(1, dtype=complex)
    for j in range(k):
        TH = np.vstack([lat.at(lat.unit(a)).H_block(j) for a in range(len(flow.q))])
        phi = -left_inverse(stacked_slashed(basis, flow.N, j)) @ (TH @ np.linalg.solve(f0.H_block(j), phi))
    return phi


def miwa_residual(base: FourierOracle, basis: LongilexBasis, N, z, k: int) -> float:
    f0 = factorize(build_moment(base, basis))
    direct = eval_family(f0, k, z)
    return float(np.abs(miwa_polynomials(base, basis, N, z, k) - direct).max())


def fullrank_report(basis: LongilexBasis, k: int) -> dict:
    """Singular values of the stack of the ``2D`` basic shifts ``(U_{+-e_a})_{[k],[k+1]}``."""
    N = np.eye(2 * basis.D)
    A = stacked_slashed(basis, N, k)
    sv = np.linalg.svd(A, compute_uv=False)
    return {"shape": A.shape, "min_sv": float(sv[-1]), "full_column_rank": bool(sv[-1] > 1e-12 and A.shape[0] >= A.shape[1])}


def positivity_margin(N, q) -> np.ndarray:
    """``q_a + 2 sum |n_a|`` per flow; nonpositive values keep a real flow sign-definite."""
    N = np.atleast_2d(np.asarray(N, dtype=complex))
    return np.real(np.asarray(q)) + np.abs(N).sum(axis=1)

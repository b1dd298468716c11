"""Variational functionals, the fibering map, and the scalar inequalities.

For a profile u at parameters (a, q, p) the energy is

    I_a(u) = 1/2 |grad u|^2 + (q^2/4) V_a(u^2, u^2) - (1/p) |u|_p^p,

with V_a the screened pair energy.  Solutions satisfy the Nehari identity
N(u) = 0 and the radial dilation (Pohozaev) identity P_a(u) = 0; their
combination J_a = 2 N + P_a defines the constraint manifold on which the
ground-state level is the infimum of I_a.

The dilation u -> t^2 u(t r) does not require resampling: it maps the pair
energies to the same reductions at screening length a*t, so the fiber value
zeta(t) = I_a(t^2 u(t.)) and its exact t-derivative are evaluated from four
cached scalars per t.  That exactness is what the projection and the
splitting inequality rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .radial import (
    FOUR_PI,
    ModelParams,
    RadialField,
    derivative_matrix,
    dirichlet_energy,
    lp_norm,
    radial_integral,
)
from .potentials import (
    KernelKind,
    delta_phi_sq,
    grad_phi_sq,
    pair_energy,
    potential,
)

__all__ = [
    "FunctionalBreakdown",
    "NonexistenceCombos",
    "FiberMap",
    "evaluate",
    "evaluate_sp",
    "el_residual",
    "el_residual_raw",
    "fiber_value",
    "fiber_derivative",
    "scalar_g",
    "exp_inequality_lhs",
    "kernel_exp_gap",
    "splitting_gap",
    "nonexistence_combos",
    "identity_scales",
]


@dataclass(frozen=True)
class FunctionalBreakdown:
    """Every scalar the variational theory attaches to one profile.

    energy, nehari, pohozaev and manifold are exact algebraic combinations
    of the four primaries (dirichlet, pair_bp, pair_exp, lp_p), so the
    definitional identities close to rounding error by construction.
    """

    dirichlet: float
    pair_bp: float
    pair_exp: float
    lp_p: float
    energy: float
    nehari: float
    pohozaev: float
    manifold: float
    m_plain: float
    m_q: float
    e_norm: float

    def to_dict(self) -> dict:
        return asdict(self)


def _assemble_breakdown(d: float, v: float, w: float, w_over_a: float,
                        lp_p: float, q: float, p: float) -> FunctionalBreakdown:
    """Build the breakdown from the primaries; w_over_a = W_a / a, which is
    zero in the Poisson limit (the exponential term is absent there)."""
    q2 = q * q
    energy = 0.5 * d + 0.25 * q2 * v - lp_p / p
    nehari = d + q2 * v - lp_p
    pohozaev = -0.5 * d - 0.25 * q2 * (5.0 * v + w_over_a) + 3.0 * lp_p / p
    manifold = 2.0 * nehari + pohozaev
    return FunctionalBreakdown(
        dirichlet=d,
        pair_bp=v,
        pair_exp=w,
        lp_p=lp_p,
        energy=energy,
        nehari=nehari,
        pohozaev=pohozaev,
        manifold=manifold,
        m_plain=d + v,
        m_q=d + q2 * v,
        e_norm=float(np.sqrt(d + np.sqrt(max(v, 0.0)))),
    )


def evaluate(u: RadialField, params: ModelParams) -> FunctionalBreakdown:
    """Full breakdown at a > 0."""
    if params.a <= 0.0:
        raise ValueError("evaluate needs a > 0; use evaluate_sp for the Poisson limit")
    a, q, p = params.a, params.q, params.p
    d = dirichlet_energy(u)
    # split evaluation keeps the breakdown bit-consistent with the fiber
    # map, which caches the t-independent Coulomb part separately
    v = pair_energy(KernelKind.coulomb(), u) - pair_energy(KernelKind.yukawa(a), u)
    w = pair_energy(KernelKind.pure_exponential(a), u)
    lp_p = lp_norm(u, p) ** p
    return _assemble_breakdown(d, v, w, w / a, lp_p, q, p)


def evaluate_sp(u: RadialField, q: float, p: float) -> FunctionalBreakdown:
    """Breakdown for the Schrodinger-Poisson limit (Coulomb kernel, no
    exponential term in the dilation identity)."""
    if q == 0.0:
        raise ValueError("coupling q must be nonzero")
    if p <= 1.0:
        raise ValueError("exponent p must exceed 1")
    d = dirichlet_energy(u)
    v = pair_energy(KernelKind.coulomb(), u)
    lp_p = lp_norm(u, p) ** p
    return _assemble_breakdown(d, v, 0.0, 0.0, lp_p, q, p)


def identity_scales(b: FunctionalBreakdown, q: float, p: float, a: float) -> dict:
    """Sum of absolute constituent terms for each identity; the natural
    denominators for 'relative' identity residuals.  Pass a = 0 for the
    Poisson limit."""
    q2 = q * q
    w_over_a = (b.pair_exp / a) if a > 0.0 else 0.0
    return {
        "nehari": abs(b.dirichlet) + q2 * abs(b.pair_bp) + abs(b.lp_p),
        "pohozaev": 0.5 * abs(b.dirichlet)
        + 0.25 * q2 * (5.0 * abs(b.pair_bp) + abs(w_over_a))
        + 3.0 * abs(b.lp_p) / p,
        "manifold": 1.5 * abs(b.dirichlet)
        + 0.75 * q2 * abs(b.pair_bp)
        + 0.25 * q2 * abs(w_over_a)
        + (2.0 * p - 3.0) / p * abs(b.lp_p),
    }


# ---------------------------------------------------------------------------
# Euler-Lagrange residual
# ---------------------------------------------------------------------------
#
# The residual field realizes -(u'' + 2 u'/r) + q^2 phi_u u - |u|^{p-2} u.
# The second-order term is discretized as the exact gradient of the
# discrete Dirichlet energy with respect to the quadrature inner product
# (the conservative form G^T W G of the centered stencil).  That choice
# makes  <u, residual>  reproduce the Nehari combination identically, so a
# small residual norm certifies the identity closure instead of competing
# with it.

def _stiffness_apply(u: RadialField) -> np.ndarray:
    g = u.grid
    dmat = derivative_matrix(g)
    wmeas = FOUR_PI * g.weights * g.nodes**2
    return dmat.T @ (wmeas * (dmat @ u.values))


def el_residual_raw(u: RadialField, params: ModelParams,
                    phi: RadialField | None = None) -> np.ndarray:
    """Euclidean gradient of I at u (one entry per node, measure included).

    <u, raw> equals the Nehari combination exactly.  a = 0 selects the
    Coulomb potential.
    """
    g = u.grid
    rho = u.values * u.values
    if phi is None:
        kind = KernelKind.coulomb() if params.a == 0.0 else KernelKind.bopp_podolsky(params.a)
        phi = potential(kind, RadialField(g, rho))
    wmeas = FOUR_PI * g.weights * g.nodes**2
    q2 = params.q * params.q
    nonlinear = np.abs(u.values) ** (params.p - 2.0) * u.values
    return _stiffness_apply(u) + wmeas * (q2 * phi.values * u.values - nonlinear)


def el_residual(u: RadialField, params: ModelParams,
                phi: RadialField | None = None) -> RadialField:
    """Strong-form residual field at the interior nodes (zero at r = 0 and
    r = r_max, where the measure weight or the boundary condition applies);
    its L^2 norm is the solver's convergence diagnostic."""
    g = u.grid
    raw = el_residual_raw(u, params, phi)
    wmeas = FOUR_PI * g.weights * g.nodes**2
    vals = np.zeros_like(raw)
    vals[1:-1] = raw[1:-1] / wmeas[1:-1]
    return RadialField(g, vals)


def residual_norm(u: RadialField, params: ModelParams,
                  phi: RadialField | None = None) -> float:
    r = el_residual(u, params, phi)
    return float(np.sqrt(radial_integral(RadialField(u.grid, r.values**2))))


# ---------------------------------------------------------------------------
# fibering map
# ---------------------------------------------------------------------------

class FiberMap:
    """zeta(t) = I_a(t^2 u(t r)) evaluated without resampling u.

    Only the kernel parameter moves (a -> a t), so each new t costs one
    screened pair-energy pass; values are cached per t.  In the Poisson
    limit the pair energy is t-independent and the map is closed-form.
    """

    def __init__(self, u: RadialField, params: ModelParams):
        if u.is_zero():
            raise ValueError("fibering map is undefined for the zero field")
        self.u = u
        self.params = params
        self.dirichlet = dirichlet_energy(u)
        self.lp_p = lp_norm(u, params.p) ** params.p
        self._cache: dict[float, tuple[float, float]] = {}
        self.evaluations = 0
        # the Coulomb part of the screened pair energy is t-independent
        self._v_coul = pair_energy(KernelKind.coulomb(), u)

    def pair_terms(self, t: float) -> tuple[float, float]:
        """(V at screening a*t, W at screening a*t); W unused when a = 0."""
        if self.params.a == 0.0:
            return self._v_coul, 0.0
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        at = self.params.a * t
        v = self._v_coul - pair_energy(KernelKind.yukawa(at), self.u)
        w = pair_energy(KernelKind.pure_exponential(at), self.u)
        self._cache[t] = (v, w)
        self.evaluations += 1
        return v, w

    def value(self, t: float) -> float:
        if t <= 0.0:
            raise ValueError(f"fiber parameter must be positive, got {t}")
        q2 = self.params.q ** 2
        p = self.params.p
        v, _ = self.pair_terms(t)
        return (
            0.5 * t**3 * self.dirichlet
            + 0.25 * q2 * t**3 * v
            - t ** (2.0 * p - 3.0) / p * self.lp_p
        )

    def derivative(self, t: float) -> float:
        if t <= 0.0:
            raise ValueError(f"fiber parameter must be positive, got {t}")
        q2 = self.params.q ** 2
        p = self.params.p
        v, w = self.pair_terms(t)
        out = (
            1.5 * t**2 * self.dirichlet
            + 0.75 * q2 * t**2 * v
            - (2.0 * p - 3.0) * t ** (2.0 * p - 4.0) / p * self.lp_p
        )
        if self.params.a > 0.0:
            out -= 0.25 * q2 * t / self.params.a * w
        return out

    def derivative_scale(self, t: float) -> float:
        """Sum of absolute terms of zeta'(t); reference for root tolerances."""
        q2 = self.params.q ** 2
        p = self.params.p
        v, w = self.pair_terms(t)
        out = (
            1.5 * t**2 * self.dirichlet
            + 0.75 * q2 * t**2 * abs(v)
            + (2.0 * p - 3.0) * t ** (2.0 * p - 4.0) / p * self.lp_p
        )
        if self.params.a > 0.0:
            out += 0.25 * q2 * t / self.params.a * abs(w)
        return out


def fiber_value(u: RadialField, params: ModelParams, t: float) -> float:
    """zeta(t); at t = 1 this is I_a(u) exactly."""
    return FiberMap(u, params).value(t)


def fiber_derivative(u: RadialField, params: ModelParams, t: float) -> float:
    """zeta'(t); at t = 1 this equals the manifold combination J_a(u)."""
    return FiberMap(u, params).derivative(t)


# ---------------------------------------------------------------------------
# scalar inequalities
# ---------------------------------------------------------------------------

def scalar_g(t: float, p: float) -> float:
    """g(t) = (1 - t^3)(2p - 3)/3 + t^{2p-3} - 1, nonnegative for p > 3/2
    with equality only at t = 1."""
    if t <= 0.0:
        raise ValueError("scalar_g needs t > 0")
    if p <= 1.5:
        raise ValueError("scalar_g needs p > 3/2")
    return (1.0 - t**3) * (2.0 * p - 3.0) / 3.0 + t ** (2.0 * p - 3.0) - 1.0


def exp_inequality_lhs(t: float, b: float) -> float:
    """t^3 (e^{-b/t} - e^{-b}) + ((1 - t^3)/3) b e^{-b}, nonnegative for all
    t > 0, b >= 0."""
    if t <= 0.0:
        raise ValueError("exp_inequality_lhs needs t > 0")
    if b < 0.0:
        raise ValueError("exp_inequality_lhs needs b >= 0")
    return t**3 * (np.exp(-b / t) - np.exp(-b)) + (1.0 - t**3) / 3.0 * b * np.exp(-b)


def kernel_exp_gap(b):
    """(1 - e^{-b})/b - e^{-b}, strictly positive for b > 0 (the pointwise
    gap between the screened kernel numerator and the exponential)."""
    b = np.asarray(b, dtype=float)
    if np.any(b <= 0.0):
        raise ValueError("kernel_exp_gap needs b > 0")
    out = -np.expm1(-b) / b - np.exp(-b)
    if out.ndim == 0:
        return float(out)
    return out


def splitting_gap(u: RadialField, params: ModelParams, t: float) -> float:
    """I_a(u) - zeta(t) - ((1 - t^3)/3) J_a(u); nonnegative up to rounding
    for p in (4, 6).  Equals (lp_p/p) g(t) plus a positive-kernel double
    integral, so the sign survives discretization with positive weights."""
    if t <= 0.0:
        raise ValueError("splitting_gap needs t > 0")
    fm = FiberMap(u, params)
    j = fm.derivative(1.0)
    return fm.value(1.0) - fm.value(t) - (1.0 - t**3) / 3.0 * j


# ---------------------------------------------------------------------------
# nonexistence combinations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NonexistenceCombos:
    """The three sign combinations that rule out solutions outside (4, 6).

    d_high < 0 for every nontrivial profile once p >= 6, d_low > 0 for
    p < 12/7, and d_radial > 0 for p <= 2; a solution would make each zero.
    """

    d_high: float
    d_low: float
    d_radial: float

    def to_dict(self) -> dict:
        return asdict(self)


def nonexistence_combos(u: RadialField, params: ModelParams) -> NonexistenceCombos:
    """Evaluate the combinations from the breakdown and the derivative
    norms of phi_u."""
    if u.is_zero():
        raise ValueError("nonexistence combinations are undefined for the zero field")
    if params.a <= 0.0:
        raise ValueError("nonexistence combinations need a > 0")
    a, q, p = params.a, params.q, params.p
    q2 = q * q
    d = dirichlet_energy(u)
    v = pair_energy(KernelKind.bopp_podolsky(a), u)
    w = pair_energy(KernelKind.pure_exponential(a), u)
    gphi = grad_phi_sq(u, a)
    lphi = delta_phi_sq(u, a)

    d_high = (6.0 - p) / (2.0 * p) * d + q2 * (12.0 - 5.0 * p) / (4.0 * p) * v \
        - q2 * a * a / (8.0 * np.pi) * lphi
    d_low = (6.0 - p) / (2.0 * p) * d \
        + q2 * ((12.0 - 5.0 * p) / (4.0 * p) - 0.5) * v \
        + q2 / (8.0 * np.pi) * gphi
    d_radial = (1.0 - p / 6.0) * d + q2 * (1.0 - 5.0 * p / 12.0) * v \
        - q2 * p / (12.0 * a) * w
    return NonexistenceCombos(d_high=float(d_high), d_low=float(d_low),
                              d_radial=float(d_radial))

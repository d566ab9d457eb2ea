"""Closed-form probability bounds for quasi-orthogonality, the law of high
dimension, and the kernel few-shot rule.

All bounds are driven by an effective-dimension profile ``beta(radius, n)``
that plays the role of the volume-decay exponent of the feature map. For the
identity map on a Euclidean ball it is the constant ``n`` with ``C = A = 1``.

Bound evaluators never raise on vacuous values: sweeping a parameter grid
routinely crosses regions where the formula drops below zero, and that is
reported through :class:`BoundValue` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from kfs.errors import DomainError, InfeasibleError

DEFAULT_GRID = 256


@dataclass(frozen=True)
class DimensionProfile:
    """Effective dimension as a function of the neighbourhood radius.

    Either a constant or a piecewise-linear table over strictly increasing
    radii (held constant beyond the table ends).
    """

    kind: str
    beta: float | None = None
    radii: tuple[float, ...] = ()
    betas: tuple[float, ...] = ()
    description: str = ""

    def __post_init__(self):
        if self.kind == "constant":
            if self.beta is None or not self.beta > 0:
                raise ValueError(f"constant beta must be positive, got {self.beta!r}")
        elif self.kind == "tabulated":
            radii = tuple(float(r) for r in self.radii)
            betas = tuple(float(b) for b in self.betas)
            if len(radii) != len(betas):
                raise ValueError("radii and betas must have equal length")
            if any(b <= 0 for b in betas):
                raise ValueError("tabulated betas must be positive")
            if any(b <= a for a, b in zip(radii, radii[1:])):
                raise ValueError("tabulated radii must be strictly increasing")
            object.__setattr__(self, "radii", radii)
            object.__setattr__(self, "betas", betas)
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")

    @classmethod
    def constant(cls, beta: float, description: str = "") -> DimensionProfile:
        return cls("constant", beta=float(beta), description=description)

    @classmethod
    def tabulated(cls, radii, betas, description: str = "") -> DimensionProfile:
        return cls("tabulated", radii=tuple(radii), betas=tuple(betas), description=description)

    @classmethod
    def identity(cls, n: int) -> DimensionProfile:
        """The identity feature map on a Euclidean ball: beta = n everywhere."""
        return cls.constant(n, description=f"identity map, n={n}")

    def __call__(self, radius, n: int | None = None):
        return beta_at(self, radius, n)


def beta_at(profile: DimensionProfile, radius, n: int | None = None):
    """Effective dimension at ``radius`` (scalar or array)."""
    if np.any(np.asarray(radius) < 0):
        raise ValueError("radius must be nonnegative")
    if profile.kind == "constant":
        if np.ndim(radius):
            return np.full(np.shape(radius), profile.beta)
        return profile.beta
    if not profile.radii:
        raise ValueError("tabulated profile has an empty table")
    out = np.interp(radius, profile.radii, profile.betas)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class BoundParams:
    """Distribution and confidence parameters shared by the bound formulas.

    ``A`` and ``r`` are the growth constant and support radius of whichever
    class the bound is about (A_X, r_X or A_Y, r_Y). ``C_star`` is the
    neighbourhood maximum of the volume constant, supplied by the caller.
    """

    A: float
    r: float
    k: int
    delta: float
    epsilon: float
    profile: DimensionProfile
    C: float = 1.0
    C_star: float = 1.0

    def __post_init__(self):
        for name in ("A", "r", "C", "C_star"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a positive real, got {v!r}")
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        for name in ("delta", "epsilon"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")

    @classmethod
    def identity(cls, n: int, r: float, k: int, delta: float, epsilon: float = 0.1) -> BoundParams:
        """Uniform distribution on a Euclidean ball under the identity map (A = C = C* = 1, beta = n)."""
        return cls(A=1.0, r=r, k=k, delta=delta, epsilon=epsilon, profile=DimensionProfile.identity(n))

    def replace(self, **changes) -> BoundParams:
        return replace(self, **changes)


@dataclass(frozen=True)
class BoundValue:
    raw: float
    clamped: float
    vacuous: bool

    @classmethod
    def of(cls, raw: float) -> BoundValue:
        raw = float(raw)
        return cls(raw=raw, clamped=min(max(raw, 0.0), 1.0), vacuous=raw <= 0.0)


def _pair_failure(p: BoundParams, n: int, constant: float) -> float:
    # k(k-1) * const * A * [(1 - delta^2)^(1/2)]^beta(r delta)
    beta = beta_at(p.profile, p.r * p.delta, n)
    return p.k * (p.k - 1) * constant * p.A * math.sqrt(1.0 - p.delta**2) ** beta


def _norm_failure(p: BoundParams, n: int) -> float:
    beta = beta_at(p.profile, 0.0, n)
    return p.k * p.C * p.A * (1.0 - p.epsilon) ** beta


def quasi_orth_bound(p: BoundParams, n: int) -> BoundValue:
    """Lower bound on P(all centred pairwise feature products are within delta * r)."""
    return BoundValue.of(1.0 - _pair_failure(p, n, p.C))


def quasi_orth_norm_bound(p: BoundParams, n: int) -> BoundValue:
    """Lower bound on P(pairwise quasi-orthogonality and all norms >= (1 - epsilon) r)."""
    return BoundValue.of(1.0 - _norm_failure(p, n) - _pair_failure(p, n, p.C))


def lhd_u(p: BoundParams) -> float:
    """Upper threshold on the squared distance from the feature mean to the centre."""
    return (p.r**2 + (p.k - 1) * p.delta * p.r) / p.k


def lhd_l(p: BoundParams) -> float:
    """Lower threshold on the same squared distance; negative means no lower bound."""
    return ((1.0 - p.epsilon) ** 2 * p.r**2 - (p.k - 1) * p.delta * p.r) / p.k


def lhd_upper_prob(p: BoundParams, n: int) -> BoundValue:
    """Lower bound on P(||mean - c||^2 <= U)."""
    return BoundValue.of(1.0 - _pair_failure(p, n, p.C))


def lhd_two_sided_prob(p: BoundParams, n: int) -> BoundValue:
    """Lower bound on P(L <= ||mean - c||^2 <= U)."""
    return BoundValue.of(1.0 - _norm_failure(p, n) - _pair_failure(p, n, p.C))


def _mean_radius(r_y: float, k: int, delta):
    return np.sqrt(r_y**2 / k + (k - 1) / k * r_y * delta)


def delta_feasible(D: float, r_Y: float, k: int, delta: float) -> float:
    """Gap between the feature-mean norm D and the concentration radius around c_Y.

    Positive values mean the decision hyperplane can be placed with margin.
    """
    return D - math.sqrt(r_Y**2 / k + (k - 1) / k * r_Y * delta)


def theta_range(Delta: float, r_Y: float) -> tuple[float, float]:
    """Admissible threshold interval ``[max(Delta - r_Y, 0), Delta]``."""
    return max(Delta - r_Y, 0.0), Delta


def _p_n_factors(p: BoundParams, gap: float, n: int, normalized: bool) -> tuple[float, float]:
    r = p.r
    b1 = math.sqrt(max(r**2 - gap**2, 0.0))
    b2 = r * math.sqrt(1.0 - p.delta**2)
    if normalized:
        b1 /= r
        b2 /= r
    f1 = 1.0 - p.C_star * p.A * b1 ** beta_at(p.profile, gap, n)
    f2 = 1.0 - p.C_star * p.A * p.k * (p.k - 1) * b2 ** beta_at(p.profile, r * p.delta, n)
    return f1, f2


def _combine(f1: float, f2: float) -> float:
    # two negative factors would multiply to a spurious positive guarantee
    if f1 <= 0.0 or f2 <= 0.0:
        return min(f1, f2)
    return f1 * f2


def p_n_bound(p: BoundParams, Delta: float, theta: float, n: int, normalized: bool = True) -> BoundValue:
    """Lower bound on the probability that a new-class point is labelled new.

    ``p`` describes the new class (A_Y, r_Y). With ``normalized`` the two
    volume-ratio bases are divided by r_Y so they are dimensionless; the
    as-printed form (``normalized=False``) exceeds 1 for r_Y > 1.
    """
    gap = Delta - theta
    if theta < 0 or gap < 0:
        raise DomainError(f"theta={theta!r} outside [0, Delta={Delta!r}]")
    if gap > p.r * (1.0 + 1e-12):
        raise DomainError(f"Delta - theta = {gap!r} exceeds r_Y = {p.r!r}")
    gap = min(gap, p.r)
    return BoundValue.of(_combine(*_p_n_factors(p, gap, n, normalized)))


def p_e_bound(p: BoundParams, theta: float, n: int) -> BoundValue:
    """Lower bound on the probability that an old-class point keeps its base label.

    ``p`` describes the old class (A_X, r_X) centred at the origin.
    """
    if theta < 0:
        raise DomainError(f"theta={theta!r} is negative")
    if theta > p.r:
        raise DomainError(f"theta={theta!r} exceeds r_X = {p.r!r}")
    base = math.sqrt(max(1.0 - theta**2 / p.r**2, 0.0))
    return BoundValue.of(1.0 - p.C_star * p.A * base ** beta_at(p.profile, theta, n))


def p_e_bound_capped(p: BoundParams, theta: float, n: int) -> BoundValue:
    """:func:`p_e_bound` with theta capped at r_X.

    For theta >= r_X the acceptance half-space misses the old-class support
    entirely, and the acceptance region only shrinks as theta grows, so the
    value at r_X (which is 1 whenever beta > 0) remains a valid bound.
    """
    return p_e_bound(p, min(theta, p.r), n)


@dataclass(frozen=True)
class DeltaTheta:
    delta: float
    theta: float
    Delta: float
    p_n: BoundValue
    p_e: BoundValue

    def __iter__(self):
        return iter((self.delta, self.theta, self.p_n, self.p_e))


def optimize_delta_theta(
    D: float,
    p: BoundParams,
    n: int,
    grid: int = DEFAULT_GRID,
    x_params: BoundParams | None = None,
    normalized: bool = True,
) -> DeltaTheta:
    """Grid-search (delta, theta) maximising ``min(p_n, p_e)``.

    ``p`` describes the new class; ``x_params`` the old class (defaults to
    ``p``). delta runs over ``grid`` interior points of (0, 1) and theta over
    ``grid`` points of the admissible interval for each delta. Exact ties go
    to the larger theta, then the larger delta.
    """
    xp = p if x_params is None else x_params
    deltas = np.linspace(0.0, 1.0, grid + 2)[1:-1]
    Deltas = D - _mean_radius(p.r, p.k, deltas)
    feasible = Deltas > 0
    if not feasible.any():
        raise InfeasibleError(
            f"no delta in (0, 1) gives Delta > 0 (best Delta = {Deltas.max():.6g})",
            D=D,
            required_D=float(_mean_radius(p.r, p.k, deltas[0])),
            max_Delta=float(Deltas.max()),
        )
    deltas, Deltas = deltas[feasible], Deltas[feasible]
    lo = np.maximum(Deltas - p.r, 0.0)
    frac = np.linspace(0.0, 1.0, grid)
    thetas = lo[:, None] + (Deltas - lo)[:, None] * frac[None, :]
    thetas[:, -1] = Deltas  # exact upper endpoint
    gaps = np.clip(Deltas[:, None] - thetas, 0.0, p.r)

    scale = p.r if normalized else 1.0
    b1 = np.sqrt(np.maximum(p.r**2 - gaps**2, 0.0)) / scale
    b2 = p.r * np.sqrt(1.0 - deltas**2) / scale
    f1 = 1.0 - p.C_star * p.A * b1 ** beta_at(p.profile, gaps, n)
    f2 = 1.0 - p.C_star * p.A * p.k * (p.k - 1) * b2 ** beta_at(p.profile, p.r * deltas, n)
    f2 = np.broadcast_to(f2[:, None], f1.shape)
    pn = np.where((f1 <= 0) | (f2 <= 0), np.minimum(f1, f2), f1 * f2)

    th = np.minimum(thetas, xp.r)
    base = np.sqrt(np.maximum(1.0 - th**2 / xp.r**2, 0.0))
    pe = 1.0 - xp.C_star * xp.A * base ** beta_at(xp.profile, th, n)

    obj = np.minimum(pn, pe)
    best = obj.max()
    rows, cols = np.nonzero(obj == best)
    # larger theta first, then larger delta
    order = np.lexsort((deltas[rows], thetas[rows, cols]))
    i, j = rows[order[-1]], cols[order[-1]]
    delta, theta, Delta = float(deltas[i]), float(thetas[i, j]), float(Deltas[i])
    py = p.replace(delta=delta)
    return DeltaTheta(
        delta=delta,
        theta=theta,
        Delta=Delta,
        p_n=p_n_bound(py, Delta, theta, n, normalized=normalized),
        p_e=p_e_bound_capped(xp, theta, n),
    )

"""Seeded Monte Carlo experiments on synthetic data.

Every trial draws from its own substream, derived from ``(master_seed,
stream id, trial index)``, so results do not depend on how trials are
split across worker processes. Trials return small tuples; aggregation uses
integer counts or ``math.fsum`` and is therefore order-independent.
"""

from __future__ import annotations

import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from statistics import NormalDist
from typing import Callable, Sequence, Union

import numpy as np

from kfs.bounds import (
    BoundParams,
    BoundValue,
    DimensionProfile,
    lhd_l,
    lhd_two_sided_prob,
    lhd_u,
    lhd_upper_prob,
    p_e_bound_capped,
    p_n_bound,
    quasi_orth_bound,
    quasi_orth_norm_bound,
)
from kfs.errors import InfeasibleError, UnsupportedRegimeError
from kfs.fewshot import FewShotModel, fit
from kfs.kernels import Kernel, SupportSample

log = logging.getLogger(__name__)

SOUNDNESS_WIDTHS = 3.0
DEFAULT_SET_SIZE = 20_000
DEFAULT_BLOCK = 10_000
INFEASIBLE_FLAG_RATE = 0.01


# ---------------------------------------------------------------- randomness


@dataclass(frozen=True)
class RngStream:
    """Deterministic family of substreams, one per trial."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master seed must be an unsigned 64-bit integer, got {self.master_seed!r}")

    @classmethod
    def for_experiment(cls, master_seed: int, name: str, *params) -> RngStream:
        """Stream whose id is a stable hash of the experiment name and its parameters."""
        key = "|".join([name, *map(str, params)])
        return cls(master_seed, zlib.crc32(key.encode()))

    def generator(self, trial: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, trial))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, tag: int) -> RngStream:
        return RngStream(self.master_seed, zlib.crc32(f"{self.stream_id}/{tag}".encode()))


def _run_chunk(fn, stream: RngStream, start: int, stop: int) -> list:
    return [fn(stream.generator(t)) for t in range(start, stop)]


def run_trials(fn: Callable[[np.random.Generator], object], stream: RngStream, trials: int, workers: int = 1) -> list:
    """Run ``fn`` once per trial on that trial's generator; results in trial order.

    ``fn`` must be picklable when ``workers > 1``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials!r}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers!r}")
    if workers == 1 or trials < 2:
        return _run_chunk(fn, stream, 0, trials)
    n_chunks = min(trials, workers * 4)
    edges = np.linspace(0, trials, n_chunks + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_chunk, fn, stream, a, b) for a, b in zip(edges[:-1], edges[1:])]
        out = []
        for f in futures:
            out.extend(f.result())
    return out


# ---------------------------------------------------------------- samplers


def sample_uniform_ball(n: int, center, radius: float, rng: np.random.Generator, size: int | None = None):
    """Uniform draw(s) from the n-ball: direction from normalised Gaussians, radius ``u^(1/n)``."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius!r}")
    center = np.broadcast_to(np.asarray(center, dtype=float), (n,))
    m = 1 if size is None else size
    g = rng.standard_normal((m, n))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0.0):  # probability zero; keeps the direction well defined
        bad = norms == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(g, axis=1)
    u = rng.random(m)
    pts = center + (radius * u ** (1.0 / n) / norms)[:, None] * g
    return pts[0] if size is None else pts


def sample_uniform_cube(n: int, half_width: float, rng: np.random.Generator, size: int | None = None):
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if not half_width > 0:
        raise ValueError(f"half width must be positive, got {half_width!r}")
    shape = (n,) if size is None else (size, n)
    return rng.uniform(-half_width, half_width, shape)


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.ravel(self.center)))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @classmethod
    def at(cls, n: int, offset: float = 0.0, radius: float = 1.0) -> Ball:
        """Ball centred at ``offset * e_1`` in R^n."""
        c = np.zeros(n)
        c[0] = offset
        return cls(tuple(c), radius)

    @property
    def n(self) -> int:
        return len(self.center)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return sample_uniform_ball(self.n, np.array(self.center), self.radius, rng, size)


@dataclass(frozen=True)
class Cube:
    n: int
    half_width: float = 1.0

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return sample_uniform_cube(self.n, self.half_width, rng, size)


Region = Union[Ball, Cube]


@dataclass(frozen=True)
class SyntheticScenario:
    """Old class uniform on a ball at the origin, new class on a ball or a cube."""

    n: int
    y_class: Region
    kernel: Kernel = field(default_factory=Kernel.linear)
    x_class: Ball | None = None

    def __post_init__(self):
        for region in (self.x_class, self.y_class):
            if region is not None and region.n != self.n:
                raise ValueError(f"region dimension {region.n} differs from n={self.n}")
        if self.x_class is not None and any(self.x_class.center):
            raise ValueError("the old class must be centred at the origin")

    @classmethod
    def separated(cls, n: int, offset: float, r_x: float = 1.0, r_y: float = 1.0, kernel: Kernel | None = None):
        return cls(n=n, x_class=Ball.at(n, 0.0, r_x), y_class=Ball.at(n, offset, r_y), kernel=kernel or Kernel.linear())

    @property
    def identity_ball(self) -> bool:
        """True in the regime where C = A = 1 and beta = n hold exactly."""
        return self.kernel.kind == "linear" and isinstance(self.y_class, Ball)


# ---------------------------------------------------------------- aggregates


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # the interval ends are exactly 0 / 1 at the extremes; keep them so despite rounding
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class Aggregate:
    successes: int
    trials: int
    bound: BoundValue | None = None
    ci_lo: float = field(init=False)
    ci_hi: float = field(init=False)

    def __post_init__(self):
        lo, hi = wilson_interval(self.successes, self.trials)
        object.__setattr__(self, "ci_lo", lo)
        object.__setattr__(self, "ci_hi", hi)

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    @property
    def half_width(self) -> float:
        return (self.ci_hi - self.ci_lo) / 2.0

    @property
    def passes(self) -> bool | None:
        """Frequency no lower than the clamped bound minus three Wilson half-widths."""
        if self.bound is None:
            return None
        return self.frequency >= self.bound.clamped - SOUNDNESS_WIDTHS * self.half_width

    def with_bound(self, bound: BoundValue) -> Aggregate:
        return Aggregate(self.successes, self.trials, bound)


def ci_nondecreasing(aggs: Sequence[Aggregate]) -> bool:
    """Each frequency is at least the previous one, up to overlapping 95% intervals."""
    return all(b.ci_hi >= a.ci_lo for a, b in zip(aggs, aggs[1:]))


def ci_nonincreasing(aggs: Sequence[Aggregate]) -> bool:
    return ci_nondecreasing(list(reversed(aggs)))


# ---------------------------------------------------------------- quasi-orthogonality and separability estimators


def _quasi_orth_trial(kernel: Kernel, n: int, delta: float, rng: np.random.Generator) -> tuple[bool, int]:
    resampled = 0
    while True:
        x, y = sample_uniform_cube(n, 1.0, rng, 2)
        kxx, kyy = kernel(x, x), kernel(y, y)
        if kxx > 0.0 and kyy > 0.0:
            break
        resampled += 1
    return abs(kernel(x, y) / math.sqrt(kxx * kyy)) <= delta, resampled


def estimate_pairwise_quasi_orth(
    kernel: Kernel, n: int, delta: float, trials: int, rng: RngStream, workers: int = 1
) -> Aggregate:
    """Frequency of ``|cos(phi(x), phi(y))| <= delta`` for x, y uniform on [-1, 1]^n."""
    if not delta >= 0:
        raise ValueError("delta must be nonnegative")
    out = run_trials(partial(_quasi_orth_trial, kernel, n, delta), rng, trials, workers)
    resampled = sum(r for _, r in out)
    if resampled:
        log.info("quasi-orth %s n=%d: resampled %d degenerate draws", kernel, n, resampled)
    return Aggregate(sum(ok for ok, _ in out), trials)


def is_separable(kernel: Kernel, x, Y, chunk: int = 256) -> bool:
    """Whether the hyperplane through ``phi(x)`` normal to ``phi(x) - mean phi(Y)`` strictly separates x from Y.

    Checks ``k(x,x) - s(x) > k(x,y) - s(y)`` for every y, where ``s(z)`` is the
    mean of ``k(y_j, z)``. Stops at the first violating chunk.
    """
    x = np.asarray(x, dtype=float)[None, :]
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    m = Y.shape[0]
    kxY = kernel.matrix(Y, x, fast=True)[:, 0]
    lhs = kernel.matrix(x, x, fast=True)[0, 0] - kxY.sum() / m
    for a in range(0, m, chunk):
        rows = kernel.matrix(Y[a : a + chunk], Y, fast=True)
        rhs = kxY[a : a + chunk] - rows.sum(axis=1) / m
        if np.any(rhs >= lhs):
            return False
    return True


def _separability_trial(kernel: Kernel, n: int, set_size: int, rng: np.random.Generator) -> bool:
    x = sample_uniform_cube(n, 1.0, rng)
    Y = sample_uniform_cube(n, 1.0, rng, set_size)
    return is_separable(kernel, x, Y)


def estimate_separability(
    kernel: Kernel, n: int, set_size: int, trials: int, rng: RngStream, workers: int = 1
) -> Aggregate:
    """Frequency with which one uniform point is linearly separable from ``set_size`` others in feature space."""
    if set_size < 1:
        raise ValueError("set_size must be >= 1")
    out = run_trials(partial(_separability_trial, kernel, n, set_size), rng, trials, workers)
    return Aggregate(sum(out), trials)


# ---------------------------------------------------------------- bound verification


def _require_identity(scenario: SyntheticScenario) -> Ball:
    if not scenario.identity_ball:
        raise UnsupportedRegimeError(
            "bound verification needs the linear kernel with a ball-shaped new class "
            f"(got {scenario.kernel} / {type(scenario.y_class).__name__})"
        )
    return scenario.y_class


@dataclass(frozen=True)
class Verification:
    """Named aggregates, each carrying the theoretical bound it is checked against."""

    name: str
    params: dict
    results: dict[str, Aggregate]
    notes: dict = field(default_factory=dict)

    @property
    def passes(self) -> bool:
        return all(a.passes is not False for a in self.results.values())


def _quasi_orth_events(ball: Ball, k: int, delta: float, epsilon: float, rng: np.random.Generator):
    P = ball.sample(rng, k) - np.array(ball.center)
    G = P @ P.T
    r = ball.radius
    off = ~np.eye(k, dtype=bool)
    a1 = bool(np.all(np.abs(G[off]) <= delta * r))
    a2 = bool(np.all(np.sqrt(np.diag(G)) >= (1.0 - epsilon) * r))
    return a1, a1 and a2


def verify_quasi_orth(
    scenario: SyntheticScenario,
    k: int,
    delta: float,
    epsilon: float,
    trials: int,
    rng: RngStream,
    workers: int = 1,
) -> Verification:
    """Empirical frequencies of pairwise quasi-orthogonality (A1) and A1 with large norms, against their bounds."""
    ball = _require_identity(scenario)
    params = BoundParams.identity(scenario.n, ball.radius, k, delta, epsilon)
    out = run_trials(partial(_quasi_orth_events, ball, k, delta, epsilon), rng, trials, workers)
    a1 = Aggregate(sum(a for a, _ in out), trials, quasi_orth_bound(params, scenario.n))
    a12 = Aggregate(sum(b for _, b in out), trials, quasi_orth_norm_bound(params, scenario.n))
    return Verification(
        "verify-quasi-orth",
        dict(n=scenario.n, k=k, delta=delta, epsilon=epsilon),
        {"A1": a1, "A1&A2": a12},
    )


def _lhd_events(ball: Ball, k: int, upper: float, lower: float, rng: np.random.Generator):
    P = ball.sample(rng, k)
    d = P.mean(axis=0) - np.array(ball.center)
    d2 = math.fsum(d * d)
    return d2 <= upper, lower <= d2 <= upper


def verify_lhd(
    scenario: SyntheticScenario,
    k: int,
    delta: float,
    epsilon: float,
    trials: int,
    rng: RngStream,
    workers: int = 1,
) -> Verification:
    """Empirical concentration of the sample mean around the centre, against its bounds."""
    ball = _require_identity(scenario)
    params = BoundParams.identity(scenario.n, ball.radius, k, delta, epsilon)
    U, L = lhd_u(params), lhd_l(params)
    out = run_trials(partial(_lhd_events, ball, k, U, L), rng, trials, workers)
    upper = Aggregate(sum(a for a, _ in out), trials, lhd_upper_prob(params, scenario.n))
    both = Aggregate(sum(b for _, b in out), trials, lhd_two_sided_prob(params, scenario.n))
    return Verification(
        "verify-lhd",
        dict(n=scenario.n, k=k, delta=delta, epsilon=epsilon),
        {"upper": upper, "two-sided": both},
        notes={"U": U, "L": L},
    )


@dataclass(frozen=True)
class _FewShotTrial:
    feasible: bool
    accepted: int = 0
    kept: int = 0
    p_n_raw: float = 0.0
    p_e_raw: float = 0.0
    D: float = 0.0
    required_D: float = 0.0


def _fewshot_trial(
    scenario: SyntheticScenario,
    k: int,
    eval_draws: int,
    delta: float,
    theta,
    normalized: bool,
    rng: np.random.Generator,
) -> _FewShotTrial:
    y_ball, x_ball = scenario.y_class, scenario.x_class
    Z = SupportSample(y_ball.sample(rng, k), "new", scenario.kernel)
    try:
        model: FewShotModel = fit(scenario.kernel, Z, y_ball.radius, delta=delta, theta=theta)
    except InfeasibleError as e:
        return _FewShotTrial(False, D=e.D, required_D=e.required_D)
    accepted = int(model.accepts(y_ball.sample(rng, eval_draws)).sum())
    kept = eval_draws - int(model.accepts(x_ball.sample(rng, eval_draws)).sum())
    n = scenario.n
    yp = BoundParams.identity(n, y_ball.radius, k, delta)
    xp = BoundParams.identity(n, x_ball.radius, k, delta)
    return _FewShotTrial(
        True,
        accepted,
        kept,
        p_n_bound(yp, model.Delta, model.theta, n, normalized=normalized).raw,
        p_e_bound_capped(xp, model.theta, n).raw,
        model.D,
    )


def _mean_bound(raws: Sequence[float]) -> BoundValue:
    # per-trial bounds hold conditionally on each support draw; average their valid (clamped-at-0) values
    return BoundValue.of(math.fsum(max(r, 0.0) for r in raws) / len(raws))


def verify_fewshot(
    scenario: SyntheticScenario,
    k: int,
    trials: int,
    rng: RngStream,
    eval_draws: int = 1000,
    delta: float = 0.2,
    theta="midrange",
    normalized: bool = True,
    workers: int = 1,
) -> Verification:
    """Fit the few-shot rule on fresh supports and measure p_n and p_e on fresh draws.

    p_n counts new-class draws labelled new; p_e counts old-class draws left
    to a constant base classifier. Theoretical values are the per-trial
    bounds averaged over feasible trials.
    """
    _require_identity(scenario)
    if scenario.x_class is None or not isinstance(scenario.y_class, Ball):
        raise UnsupportedRegimeError("few-shot verification needs ball-shaped old and new classes")
    fn = partial(_fewshot_trial, scenario, k, eval_draws, delta, theta, normalized)
    out: list[_FewShotTrial] = run_trials(fn, rng, trials, workers)
    ok = [t for t in out if t.feasible]
    bad = [(i, t.D, t.required_D) for i, t in enumerate(out) if not t.feasible]
    if not ok:
        worst = max(bad, key=lambda b: b[1])
        raise InfeasibleError(
            f"all {trials} trials infeasible (largest D={worst[1]:.6g}, required > {worst[2]:.6g})",
            D=worst[1],
            required_D=worst[2],
        )
    total = len(ok) * eval_draws
    p_n = Aggregate(sum(t.accepted for t in ok), total, _mean_bound([t.p_n_raw for t in ok]))
    p_e = Aggregate(sum(t.kept for t in ok), total, _mean_bound([t.p_e_raw for t in ok]))
    return Verification(
        "verify-fewshot",
        dict(n=scenario.n, k=k, delta=delta, theta=theta, trials=trials, eval_draws=eval_draws),
        {"p_n": p_n, "p_e": p_e},
        notes={
            "infeasible": bad,
            "infeasible_flag": len(bad) > INFEASIBLE_FLAG_RATE * trials,
            "mean_D": math.fsum(t.D for t in ok) / len(ok),
        },
    )


# ---------------------------------------------------------------- volume laws and beta


def _ball_fraction_block(n: int, radius: float, block: int, rng: np.random.Generator) -> int:
    pts = sample_uniform_ball(n, np.zeros(n), 1.0, rng, block)
    return int(np.count_nonzero(np.einsum("ij,ij->i", pts, pts) <= radius * radius))


def estimate_ball_fraction(
    n: int, radius: float, samples: int, rng: RngStream, block: int = DEFAULT_BLOCK, workers: int = 1
) -> Aggregate:
    """Fraction of uniform unit-ball samples with norm at most ``radius`` (exact value ``radius^n``)."""
    blocks, rest = divmod(samples, block)
    if rest or blocks < 1:
        raise ValueError(f"samples ({samples}) must be a positive multiple of block ({block})")
    hits = run_trials(partial(_ball_fraction_block, n, radius, block), rng, blocks, workers)
    return Aggregate(sum(hits), samples)


class RadiusTooSmallError(ValueError):
    def __init__(self, radius: float, min_distance: float):
        super().__init__(
            f"no samples within feature distance {radius:.6g}; smallest observed distance is {min_distance:.6g}"
        )
        self.radius = radius
        self.min_distance = min_distance


def _feature_dist_sq(kernel: Kernel, X: np.ndarray, anchors: np.ndarray, anchor_sq: float) -> np.ndarray:
    # ||phi(x) - mean_j phi(a_j)||^2 via the kernel trick
    d2 = kernel.diag(X) - 2.0 * kernel.matrix(X, anchors).mean(axis=1) + anchor_sq
    return np.maximum(d2, 0.0)


def _beta_block(kernel, region: Region, anchors, anchor_sq, radii, block, rng) -> tuple[np.ndarray, float]:
    d2 = _feature_dist_sq(kernel, region.sample(rng, block), anchors, anchor_sq)
    r2 = np.asarray(radii) ** 2
    counts = np.count_nonzero(d2[:, None] <= r2[None, :], axis=0)
    return counts, float(np.sqrt(d2.min()))


def _loglog_slope(radii: np.ndarray, volumes: np.ndarray) -> float:
    x, y = np.log(radii), np.log(volumes)
    x = x - x.mean()
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))


@dataclass(frozen=True)
class BetaEstimate:
    kernel: Kernel
    n: int
    radii: tuple[float, ...]
    volumes: tuple[float, ...]
    beta_hat: float
    ci_lo: float
    ci_hi: float
    min_distance: float
    degenerate: bool
    profile: DimensionProfile | None


AUTO_LEVELS = (0.01, 0.03, 0.1, 0.3, 1.0)


def estimate_beta(
    kernel: Kernel,
    region: Region,
    anchors,
    radii: Sequence[float] | None,
    samples: int,
    rng: RngStream,
    block: int = DEFAULT_BLOCK,
    bootstrap: int = 200,
    workers: int = 1,
) -> BetaEstimate:
    """Fit the volume-decay exponent from Monte Carlo ball fractions in feature space.

    The centre is the kernel mean of ``anchors`` (a single anchor for an
    explicit point). ``V(r)`` is the fraction of region samples within
    feature distance ``r``; the exponent is the least-squares slope of
    ``log V`` against ``log r``, with a block-bootstrap 95% interval.
    ``radii=None`` picks radii at fixed quantiles of a pilot block.
    """
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    n = anchors.shape[1]
    anchor_sq = float(kernel.matrix(anchors, anchors).mean())
    blocks, rest = divmod(samples, block)
    if rest or blocks < 1:
        raise ValueError(f"samples ({samples}) must be a positive multiple of block ({block})")
    if radii is None:
        pilot = np.sqrt(_feature_dist_sq(kernel, region.sample(rng.child(1).generator(0), block), anchors, anchor_sq))
        radii = np.unique(np.quantile(pilot, AUTO_LEVELS))
    radii = np.asarray(sorted(float(r) for r in radii))
    if len(radii) < 2:
        raise ValueError("need at least two distinct radii")

    out = run_trials(partial(_beta_block, kernel, region, anchors, anchor_sq, radii, block), rng, blocks, workers)
    counts = np.array([c for c, _ in out])
    min_distance = min(m for _, m in out)
    total = counts.sum(axis=0)
    for r, c in zip(radii, total):
        if c == 0:
            raise RadiusTooSmallError(float(r), min_distance)
    volumes = total / samples
    beta_hat = _loglog_slope(radii, volumes)

    boot_rng = rng.child(2).generator(0)
    reps = []
    for _ in range(bootstrap):
        c = counts[boot_rng.integers(0, blocks, blocks)].sum(axis=0)
        if np.all(c > 0):
            reps.append(_loglog_slope(radii, c / samples))
    ci_lo, ci_hi = (np.percentile(reps, [2.5, 97.5]) if reps else (math.nan, math.nan))

    degenerate = beta_hat <= 0.0
    local = np.gradient(np.log(volumes), np.log(radii))
    profile = None
    if not degenerate and np.all(local > 0):
        profile = DimensionProfile.tabulated(radii, local, description=f"Monte Carlo estimate, {kernel}, n={n}")
    if degenerate:
        log.warning("beta estimate for %s n=%d is degenerate (flat volume curve)", kernel, n)
    return BetaEstimate(
        kernel=kernel,
        n=n,
        radii=tuple(radii.tolist()),
        volumes=tuple(volumes.tolist()),
        beta_hat=beta_hat,
        ci_lo=float(ci_lo),
        ci_hi=float(ci_hi),
        min_distance=min_distance,
        degenerate=degenerate,
        profile=profile,
    )


__all__ = [
    "Aggregate",
    "Ball",
    "BetaEstimate",
    "Cube",
    "RadiusTooSmallError",
    "RngStream",
    "SyntheticScenario",
    "Verification",
    "ci_nondecreasing",
    "ci_nonincreasing",
    "estimate_ball_fraction",
    "estimate_beta",
    "estimate_pairwise_quasi_orth",
    "estimate_separability",
    "is_separable",
    "run_trials",
    "sample_uniform_ball",
    "sample_uniform_cube",
    "verify_fewshot",
    "verify_lhd",
    "verify_quasi_orth",
    "wilson_interval",
]

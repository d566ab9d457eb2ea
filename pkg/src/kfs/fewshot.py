"""Kernel-mean few-shot rule layered on top of an existing classifier.

A point ``x`` gets the new label when its inner product with the support
kernel mean reaches ``theta * D``; everything else is deferred to the base
classifier. ``D`` is the norm of the kernel mean and ``theta`` is chosen from
an interval determined by how far ``D`` clears the concentration radius of
the new class.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Protocol, Sequence, Union

import numpy as np

from kfs.bounds import (
    DEFAULT_GRID,
    BoundParams,
    delta_feasible,
    optimize_delta_theta,
    theta_range,
)
from kfs.errors import DomainError, InfeasibleError
from kfs.kernels import Kernel, SupportSample, d_statistic, mean_score, mean_scores

MODEL_FORMAT = "kfs-fewshot-model"
MODEL_VERSION = 1
_SLACK = 1e-12


class BasePredictor(Protocol):
    def predict(self, x) -> Hashable: ...


@dataclass(frozen=True)
class ConstantPredictor:
    """Base classifier that always answers ``label``; the CLI's stand-in for F."""

    label: Hashable

    def predict(self, x) -> Hashable:
        return self.label


@dataclass(frozen=True)
class Optimize:
    """Pick delta (and optionally theta) by maximising ``min(p_n, p_e)`` over a grid."""

    y_params: BoundParams
    n: int | None = None
    x_params: BoundParams | None = None
    grid: int = DEFAULT_GRID


DeltaPolicy = Union[float, Optimize]
ThetaPolicy = Union[float, str]


@dataclass(frozen=True, eq=False)
class FewShotModel:
    kernel: Kernel
    support: SupportSample
    r_y: float
    D: float
    delta: float
    Delta: float
    theta: float

    def __post_init__(self):
        if self.support.kernel != self.kernel:
            raise ValueError("support sample was built with a different kernel")
        D = d_statistic(self.kernel, self.support)
        if not math.isclose(D, self.D, rel_tol=_SLACK, abs_tol=_SLACK):
            raise ValueError(f"D={self.D!r} does not match the support sample (expected {D!r})")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        Delta = delta_feasible(self.D, self.r_y, self.support.k, self.delta)
        if not math.isclose(Delta, self.Delta, rel_tol=_SLACK, abs_tol=_SLACK):
            raise ValueError(f"Delta={self.Delta!r} inconsistent with D, r_y, k, delta (expected {Delta!r})")
        if not self.Delta > 0:
            raise InfeasibleError("Delta must be positive", D=self.D, max_Delta=self.Delta)
        lo, hi = theta_range(self.Delta, self.r_y)
        if not lo - _SLACK <= self.theta <= hi + _SLACK:
            raise DomainError(f"theta={self.theta!r} outside [{lo!r}, {hi!r}]")

    @property
    def new_label(self) -> Hashable:
        return self.support.label

    @property
    def k(self) -> int:
        return self.support.k

    @property
    def n(self) -> int:
        return self.support.n

    def margin(self, x) -> float:
        return margin(self, x)

    def margins(self, X) -> np.ndarray:
        """:meth:`margin` for every row of ``X``."""
        return mean_scores(self.kernel, self.support, X) - self.theta * self.D

    def accepts(self, X) -> np.ndarray:
        return self.margins(X) >= 0.0

    def classify(self, x, base: BasePredictor) -> Hashable:
        return classify(self, x, base)

    # serialisation

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "kernel": {"kind": self.kernel.kind, "param": self.kernel.param},
            "label": self.new_label,
            "r_y": self.r_y,
            "D": self.D,
            "delta": self.delta,
            "Delta": self.Delta,
            "theta": self.theta,
            "support": self.support.points.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> FewShotModel:
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"not a {MODEL_FORMAT} document")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        kernel = Kernel(doc["kernel"]["kind"], doc["kernel"]["param"])
        support = SupportSample(np.array(doc["support"], dtype=float), doc["label"], kernel)
        return cls(
            kernel=kernel,
            support=support,
            r_y=float(doc["r_y"]),
            D=float(doc["D"]),
            delta=float(doc["delta"]),
            Delta=float(doc["Delta"]),
            theta=float(doc["theta"]),
        )

    def dumps(self) -> str:
        # json writes floats with repr(), the shortest string that round-trips exactly
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> FewShotModel:
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> FewShotModel:
        return cls.loads(Path(path).read_text())


_THETA_POSITIONS = {"min": 0.0, "midrange": 0.5, "max": 1.0}


def _required_D(r_y: float, k: int, delta: float) -> float:
    return math.sqrt(r_y**2 / k + (k - 1) / k * r_y * delta)


def fit(
    kernel: Kernel,
    Z: SupportSample,
    r_y: float,
    delta: DeltaPolicy = 0.5,
    theta: ThetaPolicy = "midrange",
) -> FewShotModel:
    """Fit the few-shot rule to a support sample.

    ``delta`` is either a fixed value in (0, 1) or an :class:`Optimize`
    instance. ``theta`` is a fixed value, a named position in the admissible
    interval (keys of ``_THETA_POSITIONS``, default its midpoint), or
    ``"optimize"`` (requires ``delta=Optimize(...)``).

    Raises :class:`InfeasibleError` when the kernel mean is too short to
    clear the new-class concentration radius for the chosen delta.
    """
    if not r_y > 0:
        raise ValueError(f"r_y must be positive, got {r_y!r}")
    if Z.k < 1:
        raise ValueError("support sample is empty")
    if Z.kernel != kernel:
        Z = SupportSample(Z.points, Z.label, kernel)
    D = d_statistic(kernel, Z)

    chosen_theta = None
    if isinstance(delta, Optimize):
        yp = delta.y_params
        if yp.k != Z.k or not math.isclose(yp.r, r_y):
            raise ValueError("Optimize.y_params must describe the same k and r_y as the fit")
        best = optimize_delta_theta(D, yp, delta.n or Z.n, grid=delta.grid, x_params=delta.x_params)
        d = best.delta
        if theta == "optimize":
            chosen_theta = best.theta
    else:
        d = float(delta)
        if not 0 < d < 1:
            raise ValueError(f"delta must lie in (0, 1), got {d!r}")
        if theta == "optimize":
            raise ValueError("theta='optimize' needs delta=Optimize(...)")

    Delta = delta_feasible(D, r_y, Z.k, d)
    if not Delta > 0:
        req = _required_D(r_y, Z.k, d)
        raise InfeasibleError(
            f"infeasible support sample: D={D:.6g} but D > {req:.6g} is required (delta={d:g})",
            D=D,
            required_D=req,
            max_Delta=Delta,
        )
    lo, hi = theta_range(Delta, r_y)
    if chosen_theta is None:
        if theta in _THETA_POSITIONS:
            chosen_theta = lo + _THETA_POSITIONS[theta] * (hi - lo)
        elif isinstance(theta, str):
            raise ValueError(f"unknown theta policy {theta!r}")
        else:
            chosen_theta = float(theta)
            if not lo <= chosen_theta <= hi:
                raise DomainError(f"theta={chosen_theta!r} outside the admissible interval [{lo!r}, {hi!r}]")
    return FewShotModel(kernel=kernel, support=Z, r_y=r_y, D=D, delta=d, Delta=Delta, theta=chosen_theta)


def margin(model: FewShotModel, x) -> float:
    """Decision value ``mean_score(x) - theta * D``; nonnegative means new class."""
    return mean_score(model.kernel, model.support, x) - model.theta * model.D


def classify(model: FewShotModel, x, base: BasePredictor) -> Hashable:
    if margin(model, x) >= 0.0:
        return model.new_label
    return base.predict(x)


@dataclass(frozen=True)
class Cascade:
    """Several new classes: models are tried in order and the first acceptance wins."""

    models: Sequence[FewShotModel]
    base: BasePredictor

    def predict(self, x) -> Hashable:
        for m in self.models:
            if margin(m, x) >= 0.0:
                return m.new_label
        return self.base.predict(x)

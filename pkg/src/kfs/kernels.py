"""Kernels and feature-space geometry computed through the kernel trick.

Every feature-space quantity used elsewhere in the package (inner products,
distances, cosines, the kernel mean and its norm) is expressed here in terms
of kernel evaluations only, so the same code serves finite feature maps
(linear, polynomial) and infinite ones (Gaussian, Laplacian).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np
from scipy.spatial.distance import cdist

from kfs.errors import DegenerateInputError, DimensionMismatchError, PSDViolationError

# Squared feature distances in (-NEG_TOL, 0) are round-off; below that the kernel is broken.
NEG_TOL = 1e-9

KINDS = ("linear", "polynomial", "gaussian", "laplacian")


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def _same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise DimensionMismatchError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")


@dataclass(frozen=True)
class Kernel:
    """A kernel from the fixed catalogue: linear, polynomial, Gaussian, Laplacian.

    ``param`` holds the polynomial degree (integer), the Gaussian width sigma
    or the Laplacian rate alpha; the linear kernel has ``param=None``.
    """

    kind: str
    param: float | int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "linear":
            if self.param is not None:
                raise ValueError("linear kernel takes no parameter")
        elif self.kind == "polynomial":
            if isinstance(self.param, bool) or not float(self.param).is_integer() or self.param < 1:
                raise ValueError(f"polynomial degree must be an integer >= 1, got {self.param!r}")
            object.__setattr__(self, "param", int(self.param))
        else:
            if self.param is None or not (float(self.param) > 0 and math.isfinite(self.param)):
                raise ValueError(f"{self.kind} parameter must be a positive real, got {self.param!r}")
            object.__setattr__(self, "param", float(self.param))

    @classmethod
    def linear(cls) -> Kernel:
        return cls("linear")

    @classmethod
    def polynomial(cls, degree: int) -> Kernel:
        return cls("polynomial", degree)

    @classmethod
    def gaussian(cls, sigma: float) -> Kernel:
        return cls("gaussian", sigma)

    @classmethod
    def laplacian(cls, alpha: float) -> Kernel:
        return cls("laplacian", alpha)

    @classmethod
    def parse(cls, text: str) -> Kernel:
        """Build a kernel from ``linear``, ``polynomial:2``, ``gaussian:0.7`` or ``laplacian:1``."""
        name, _, arg = text.strip().partition(":")
        name = name.strip().lower()
        aliases = {"poly": "polynomial", "rbf": "gaussian", "identity": "linear"}
        name = aliases.get(name, name)
        if name == "linear":
            if arg:
                raise ValueError("linear kernel takes no parameter")
            return cls.linear()
        if not arg:
            raise ValueError(f"kernel {name!r} needs a parameter, e.g. {name}:1")
        if name == "polynomial":
            return cls.polynomial(int(arg))
        return cls(name, float(arg))

    @property
    def spec(self) -> str:
        """Inverse of :meth:`parse`; also used as the kernel column in CSV output."""
        if self.kind == "linear":
            return "linear"
        return f"{self.kind}:{self.param!r}"

    def __str__(self) -> str:
        return self.spec

    @property
    def bounded(self) -> bool:
        """True when 0 < k(x, y) <= 1 and k(x, x) = 1 everywhere."""
        return self.kind in ("gaussian", "laplacian")

    def __call__(self, x, y) -> float:
        x, y = _as_vector(x), _as_vector(y)
        _same_dim(x, y)
        if self.kind == "linear":
            return math.fsum(x * y)
        if self.kind == "polynomial":
            return (math.fsum(x * y) + 1.0) ** self.param
        d = x - y
        sq = math.fsum(d * d)
        if self.kind == "gaussian":
            return math.exp(-sq / (2.0 * self.param**2))
        return math.exp(-self.param * math.sqrt(sq))

    def matrix(self, X, Y, fast: bool = False) -> np.ndarray:
        """Kernel matrix ``K[i, j] = k(X[i], Y[j])``.

        With ``fast=True`` squared distances come from the Gram expansion
        (one matrix product) instead of explicit differences; entries can
        then be off by a few ulps, which is fine for Monte Carlo loops.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if X.shape[1] != Y.shape[1]:
            raise DimensionMismatchError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
        if self.kind == "linear":
            return X @ Y.T
        if self.kind == "polynomial":
            return (X @ Y.T + 1.0) ** self.param
        if fast:
            sq = np.einsum("ij,ij->i", X, X)[:, None] + np.einsum("ij,ij->i", Y, Y)[None, :]
            sq -= 2.0 * (X @ Y.T)
            np.maximum(sq, 0.0, out=sq)
        else:
            sq = cdist(X, Y, "sqeuclidean")
        if self.kind == "gaussian":
            return np.exp(-sq / (2.0 * self.param**2))
        return np.exp(-self.param * np.sqrt(sq))

    def diag(self, X) -> np.ndarray:
        """Self-kernels ``k(x, x)`` for each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "linear":
            return np.einsum("ij,ij->i", X, X)
        if self.kind == "polynomial":
            return (np.einsum("ij,ij->i", X, X) + 1.0) ** self.param
        return np.ones(X.shape[0])


def eval_kernel(kernel: Kernel, x, y) -> float:
    """Functional alias for ``kernel(x, y)``."""
    return kernel(x, y)


@dataclass(frozen=True, eq=False)
class SupportSample:
    """The k labelled points of a new class, with their Gram matrix cached."""

    points: np.ndarray
    label: Hashable
    kernel: Kernel
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.array(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("support sample needs at least one point of dimension >= 1")
        pts.setflags(write=False)
        gram = self.kernel.matrix(pts, pts)
        # cdist is symmetric already; enforce it bit-for-bit for the polynomial/linear products
        gram = np.triu(gram) + np.triu(gram, 1).T
        gram[np.diag_indices_from(gram)] = [self.kernel(p, p) for p in pts]
        gram.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "gram", gram)

    @property
    def k(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.k


def feature_distance_sq(kernel: Kernel, x, y) -> float:
    """Squared feature distance ``||phi(x) - phi(y)||^2``."""
    v = kernel(x, x) - 2.0 * kernel(x, y) + kernel(y, y)
    if v < 0.0:
        if v < -NEG_TOL:
            raise PSDViolationError(f"negative squared feature distance {v:.3e}")
        return 0.0
    return v


def feature_cosine(kernel: Kernel, x, y) -> float:
    """Cosine of the angle between ``phi(x)`` and ``phi(y)``."""
    kxx, kyy = kernel(x, x), kernel(y, y)
    if kxx <= 0.0 or kyy <= 0.0:
        raise DegenerateInputError("zero self-kernel: the feature vector has no direction")
    denom = math.sqrt(kxx * kyy)
    if denom == 0.0 or math.isinf(denom):  # product under/overflowed
        denom = math.sqrt(kxx) * math.sqrt(kyy)
    return kernel(x, y) / denom


def _check_query(Z: SupportSample, x) -> np.ndarray:
    x = _as_vector(x)
    if x.shape[0] != Z.n:
        raise DimensionMismatchError(f"query has dimension {x.shape[0]}, support has {Z.n}")
    return x


def kernel_row(kernel: Kernel, Z: SupportSample, x) -> np.ndarray:
    """Values ``k(x_i, x)`` for every support point."""
    x = _check_query(Z, x)
    return np.array([kernel(p, x) for p in Z.points])


def mean_score(kernel: Kernel, Z: SupportSample, x) -> float:
    """Inner product of the support kernel mean with ``phi(x)``."""
    return math.fsum(kernel_row(kernel, Z, x)) / Z.k


def mean_scores(kernel: Kernel, Z: SupportSample, X) -> np.ndarray:
    """:func:`mean_score` for each row of ``X`` (same compensated summation)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != Z.n:
        raise DimensionMismatchError(f"queries have dimension {X.shape[1]}, support has {Z.n}")
    K = kernel.matrix(Z.points, X)
    return np.array([math.fsum(col) for col in K.T]) / Z.k


def gram_sum(kernel: Kernel, Z: SupportSample) -> float:
    gram = Z.gram if kernel == Z.kernel else kernel.matrix(Z.points, Z.points)
    return math.fsum(gram.ravel())


def d_statistic(kernel: Kernel, Z: SupportSample) -> float:
    """Norm of the empirical feature mean, ``(1/k) * sqrt(sum_ij k(x_i, x_j))``."""
    s = gram_sum(kernel, Z)
    if s < 0.0:
        if s < -NEG_TOL:
            raise PSDViolationError(f"negative Gram sum {s:.3e}")
        s = 0.0
    return math.sqrt(s) / Z.k

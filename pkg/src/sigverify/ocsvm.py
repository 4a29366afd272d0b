"""One-class nu-SVM trained from scratch on genuine samples only.

The dual problem solved here is

    minimize   0.5 * sum_ij alpha_i alpha_j K(x_i, x_j)
    subject to 0 <= alpha_i <= 1 / (nu * n),  sum_i alpha_i = 1

via two-coordinate (SMO-style) updates that always move the maximal
violating pair, ties broken toward the lowest index so training is
deterministic for a fixed input order. Training sets are a couple dozen
signatures per writer, so the kernel matrix is kept dense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .features import FeatureVector

KERNEL_KINDS = ("rbf", "linear", "polynomial", "sigmoid_kernel")


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, violation: float):
        super().__init__(message)
        self.violation = violation


@dataclass(frozen=True)
class KernelParams:
    kind: str = "rbf"
    sigma: float = 0.01
    degree: float = 3.0
    coef: float = 0.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"kernel kind must be one of {KERNEL_KINDS}")
        if self.kind == "rbf" and self.sigma <= 0:
            raise ValueError("rbf kernel needs sigma > 0")


@dataclass(frozen=True)
class SolverConfig:
    nu: float = 0.01
    tolerance: float = 1e-6
    max_iterations: int = 100_000

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise ValueError("nu must lie in (0, 1]")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class OcsvmModel:
    """Trained model: training points with their multipliers and the offset."""

    support_points: np.ndarray  # (n, dim), every training point
    alphas: np.ndarray  # (n,), in [0, 1/(nu n)], summing to 1
    offset_b: float
    kernel: KernelParams
    train_count: int

    @property
    def support_count(self) -> int:
        return int(np.count_nonzero(self.alphas > 0))


def kernel_matrix(xs: np.ndarray, ys: np.ndarray, params: KernelParams) -> np.ndarray:
    """Pairwise kernel values between the rows of xs and ys."""
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_2d(np.asarray(ys, dtype=np.float64))
    if xs.shape[1] != ys.shape[1]:
        raise ValueError("feature dimension mismatch")
    if params.kind == "rbf":
        sq = (
            np.sum(xs * xs, axis=1)[:, None]
            + np.sum(ys * ys, axis=1)[None, :]
            - 2.0 * (xs @ ys.T)
        )
        return np.exp(-np.maximum(sq, 0.0) / (2.0 * params.sigma * params.sigma))
    dots = xs @ ys.T
    if params.kind == "linear":
        return dots
    if params.kind == "polynomial":
        return (dots + params.coef) ** params.degree
    return np.tanh(params.degree * dots + params.coef)


def kernel_eval(x: FeatureVector, y: FeatureVector, params: KernelParams) -> float:
    if x.dim != y.dim:
        raise ValueError("feature dimension mismatch")
    return float(kernel_matrix(x.values[None, :], y.values[None, :], params)[0, 0])


def _as_matrix(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        mat = np.asarray(data, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError("training data must be a 2-D array or FeatureVectors")
        return mat
    rows = [f.values if isinstance(f, FeatureVector) else np.asarray(f, np.float64) for f in data]
    if not rows:
        raise ValueError("no training data")
    dim = rows[0].size
    if any(r.size != dim for r in rows):
        raise ValueError("feature dimension mismatch")
    return np.stack(rows)


def train_ocsvm(
    data: Sequence[FeatureVector] | np.ndarray,
    kernel: KernelParams | None = None,
    solver: SolverConfig | None = None,
    objective_trace: list | None = None,
) -> OcsvmModel:
    """Solve the dual to KKT tolerance and recover the offset.

    The offset is the mean of sum_j alpha_j K(x_j, x_i) over margin support
    vectors (multipliers strictly inside the box); if none exist it falls
    back to the midpoint of the KKT-feasible interval.
    """
    kernel = kernel or KernelParams()
    solver = solver or SolverConfig()
    x = _as_matrix(data)
    n = x.shape[0]
    if n == 0:
        raise ValueError("no training data")

    cap = 1.0 / (solver.nu * n)
    q = kernel_matrix(x, x, kernel)

    # Feasible start: fill multipliers to the box cap until they sum to 1.
    alpha = np.zeros(n)
    full = int(math.floor(solver.nu * n))
    alpha[:full] = cap
    if full < n:
        alpha[full] = max(1.0 - full * cap, 0.0)
    grad = q @ alpha

    if objective_trace is not None:
        objective_trace.append(0.5 * float(alpha @ grad))

    converged = False
    violation = math.inf
    for _ in range(solver.max_iterations):
        up = np.where(alpha > 0.0, grad, -np.inf)
        down = np.where(alpha < cap, grad, np.inf)
        i = int(np.argmax(up))  # largest gradient among decreasable
        j = int(np.argmin(down))  # smallest gradient among increasable
        violation = float(up[i] - down[j])  # -inf/+inf when a side has no movers
        if violation < solver.tolerance:
            converged = True
            break
        quad = q[i, i] + q[j, j] - 2.0 * q[i, j]
        if quad <= 0.0:
            quad = 1e-12
        step = min(violation / quad, alpha[i], cap - alpha[j])
        # Assign bounds exactly when hit, so the movable-index masks stay sharp.
        alpha[i] = 0.0 if step >= alpha[i] else alpha[i] - step
        alpha[j] = cap if step >= cap - alpha[j] else alpha[j] + step
        grad += step * (q[:, j] - q[:, i])
        if objective_trace is not None:
            objective_trace.append(0.5 * float(alpha @ grad))

    if not converged:
        raise ConvergenceError(
            f"solver did not converge within {solver.max_iterations} iterations "
            f"(KKT violation {violation:.3e})",
            violation,
        )

    grad = q @ alpha  # recomputed: the incremental gradient carries drift
    margin = (alpha > 0.0) & (alpha < cap)
    if margin.any():
        b = float(grad[margin].mean())
    else:
        at_cap = alpha >= cap
        at_zero = alpha <= 0.0
        lo = float(grad[at_cap].max()) if at_cap.any() else None
        hi = float(grad[at_zero].min()) if at_zero.any() else None
        if lo is not None and hi is not None:
            b = 0.5 * (lo + hi)
        else:
            b = lo if lo is not None else hi

    return OcsvmModel(
        support_points=x,
        alphas=alpha,
        offset_b=b,
        kernel=kernel,
        train_count=n,
    )


def decision_value(model: OcsvmModel, x: FeatureVector | np.ndarray) -> float:
    """Raw score sum_i alpha_i K(x_i, x) - b; >= 0 classifies as in-class."""
    vec = x.values if isinstance(x, FeatureVector) else np.asarray(x, np.float64)
    if vec.size != model.support_points.shape[1]:
        raise ValueError("feature dimension mismatch")
    k = kernel_matrix(model.support_points, vec[None, :], model.kernel)[:, 0]
    return float(model.alphas @ k - model.offset_b)


def decide(model: OcsvmModel, x: FeatureVector | np.ndarray) -> int:
    """Sign of the raw score with 0 mapped to +1."""
    return 1 if decision_value(model, x) >= 0.0 else -1


def _sigmoid(v: float) -> float:
    if v >= 0.0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def probability_score(model: OcsvmModel, x: FeatureVector | np.ndarray) -> float:
    """Sigmoid of the raw score: a calibrated-ish value in (0, 1)."""
    return _sigmoid(decision_value(model, x))

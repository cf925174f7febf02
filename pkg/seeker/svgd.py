# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Stein variational gradient descent.

Particles are moved along

    psi(x_i) = 1/n sum_j [ k(x_j, x_i) grad log p(x_j) + grad_{x_j} k(x_j, x_i) ]

with the RBF kernel k(a, b) = exp(-||a - b||^2 / h). The first term pulls
particles toward high posterior density, the second pushes them apart.

The array functions (`stein_directions`, `median_bandwidth_of`) work on any
(n, dim) particle matrix, so the same code drives policy ensembles and the
low dimensional sampler benchmarks. Matrices are flattened and compared with
the Frobenius norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from . import logging
from .core.constants import MEDIAN
from .core.exceptions import InvalidInputError, NumericError
from .policy import ParticleEnsemble


@dataclass(frozen=True)
class KernelConfig:
    """RBF kernel bandwidth: a fixed positive number, or "median" to use the
    median heuristic at every step.
    """
    bandwidth: Union[float, str] = MEDIAN

    def __post_init__(self):
        if isinstance(self.bandwidth, str):
            if self.bandwidth != MEDIAN:
                raise InvalidInputError("Bandwidth must be positive or 'median'.")
        elif not self.bandwidth > 0:
            raise InvalidInputError("Bandwidth must be positive or 'median'.")

    @property
    def is_median(self) -> bool:
        return isinstance(self.bandwidth, str)

    def resolve(self, X: np.ndarray) -> float:
        return median_bandwidth_of(X) if self.is_median else float(self.bandwidth)


def _as_flat(a) -> np.ndarray:
    return np.asarray(getattr(a, "theta", a), dtype=np.float64).ravel()


def _check_pair(a, b):
    a, b = np.asarray(getattr(a, "theta", a)), np.asarray(getattr(b, "theta", b))
    if a.shape != b.shape:
        raise InvalidInputError("Kernel arguments differ in shape: {} and {}.".format(
            a.shape, b.shape))
    return _as_flat(a), _as_flat(b)


def rbf_kernel(a, b, h: float) -> float:
    """exp(-||a - b||^2 / h). Accepts particles or arrays."""
    if not h > 0:
        raise InvalidInputError("Bandwidth must be positive.")
    a, b = _check_pair(a, b)
    diff = a - b
    return math.exp(-float(diff @ diff) / h)


def kernel_grad_wrt_first(a, b, h: float) -> np.ndarray:
    """Gradient of rbf_kernel(a, b, h) with respect to `a`, shaped like `a`."""
    shape = np.shape(getattr(a, "theta", a))
    k = rbf_kernel(a, b, h)
    fa, fb = _check_pair(a, b)
    return ((2.0 / h) * k * (fb - fa)).reshape(shape)


def median_bandwidth_of(X: np.ndarray) -> float:
    """Median heuristic: med^2 / log(n + 1), med the median pairwise distance.

    Falls back to 1 for fewer than two particles or identical particles.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 2:
        return 1.0
    med = float(np.median(pdist(X.reshape(n, -1))))
    if med == 0.0:
        return 1.0
    return med ** 2 / math.log(n + 1)


def median_bandwidth(ensemble: ParticleEnsemble) -> float:
    return median_bandwidth_of(ensemble.flat())


def kernel_matrix(X: np.ndarray, h: float) -> np.ndarray:
    n = X.shape[0]
    if n == 1:
        return np.ones((1, 1))
    return np.exp(-squareform(pdist(X, "sqeuclidean")) / h)


def stein_directions(X: np.ndarray, scores: np.ndarray, h: float) -> np.ndarray:
    """SVGD update directions for particle rows `X` given the rows of
    `scores`, the log-density gradients at each particle.
    """
    X = np.asarray(X, dtype=np.float64)
    scores = np.asarray(scores, dtype=np.float64)
    if X.ndim != 2 or scores.shape != X.shape:
        raise InvalidInputError(
            "Particles and scores must both be (n, dim); got {} and {}.".format(
                X.shape, scores.shape))
    n = X.shape[0]
    K = kernel_matrix(X, h)
    drift = K @ scores
    # sum_j grad_{x_j} k(x_j, x_i) = (2/h) sum_j k_ij (x_i - x_j)
    repulsion = (2.0 / h) * (K.sum(axis=1)[:, None] * X - K @ X)
    return (drift + repulsion) / n


def svgd_directions(ensemble: ParticleEnsemble, posterior_grads: Sequence[np.ndarray],
                    kernel_config: KernelConfig = KernelConfig()) -> List[np.ndarray]:
    """Per-particle SVGD direction, each shaped like a particle's theta."""
    n = len(ensemble)
    if len(posterior_grads) != n:
        raise InvalidInputError("Need {} posterior gradients, got {}.".format(
            n, len(posterior_grads)))
    shape = ensemble.shape
    for g in posterior_grads:
        if np.shape(g) != shape:
            raise InvalidInputError("Posterior gradient shape {} does not match {}.".format(
                np.shape(g), shape))
    X = ensemble.flat()
    G = np.stack([np.asarray(g, dtype=np.float64).ravel() for g in posterior_grads])
    psi = stein_directions(X, G, kernel_config.resolve(X))
    return [row.reshape(shape) for row in psi]


def _check_finite(directions):
    for i, d in enumerate(directions):
        if not np.isfinite(d).all():
            raise NumericError("Non-finite SVGD direction for particle {}.".format(i))


def svgd_step(ensemble: ParticleEnsemble, directions: Sequence[np.ndarray],
              step: float) -> ParticleEnsemble:
    """In place update theta_i += step * psi_i. The whole step is rejected if
    any direction has non-finite entries.
    """
    if step < 0:
        raise InvalidInputError("Step size must not be negative.")
    if len(directions) != len(ensemble):
        raise InvalidInputError("Need one direction per particle.")
    _check_finite(directions)
    for particle, d in zip(ensemble, directions):
        particle.theta += step * d
    return ensemble


class AdaptiveStepper:
    """Per-entry step scaling by a running average of squared directions,
    in the AdaGrad-with-momentum style commonly used with SVGD.

    The first call uses the raw squared direction as the history.
    """

    def __init__(self, step: float, decay: float = 0.9, fudge: float = 1e-6):
        self.step = step
        self.decay = decay
        self.fudge = fudge
        self.history = None

    def __call__(self, ensemble: ParticleEnsemble, directions: Sequence[np.ndarray]):
        _check_finite(directions)
        D = np.stack(directions)
        if self.history is None:
            self.history = D ** 2
        else:
            self.history = self.decay * self.history + (1.0 - self.decay) * D ** 2
        scaled = D / (self.fudge + np.sqrt(self.history))
        return svgd_step(ensemble, list(scaled), self.step)

    def state(self):
        return None if self.history is None else self.history.tolist()

    def set_state(self, history):
        self.history = None if history is None else np.asarray(history, dtype=np.float64)


def run_svgd(X: np.ndarray, score_fn, steps: int, step: float,
             kernel_config: KernelConfig = KernelConfig()) -> np.ndarray:
    """Transport particle rows `X` for `steps` fixed-size steps toward the
    density whose log-gradient is `score_fn(X)`. Returns the new array.
    """
    X = np.array(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    for it in range(steps):
        psi = stein_directions(X, score_fn(X), kernel_config.resolve(X))
        if not np.isfinite(psi).all():
            raise NumericError("Non-finite SVGD direction at iteration {}.".format(it))
        X += step * psi
    logging.debug("svgd: {} steps, final mean {}".format(steps, X.mean(axis=0)))
    return X

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

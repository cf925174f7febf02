# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""SVGD sampler benchmark on targets with closed-form moments.

Targets are equal-weight mixtures of unit-covariance Gaussians:

gauss1d
    N(0, 1).
mixture2-1d
    Modes at -2 and 2. Mean 0, variance 5.
mixture2-2d
    Modes at (-2, 0) and (2, 0). Mean 0, covariance diag(5, 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.special import softmax

from .. import logging
from ..core.exceptions import BenchTargetError, InvalidInputError
from ..svgd import KernelConfig, run_svgd


# Particles closer than this to a mode count as covering it.
MODE_RADIUS = 0.5


@dataclass(frozen=True)
class BenchTarget:
    name: str
    modes: np.ndarray

    @property
    def dim(self) -> int:
        return self.modes.shape[1]

    @property
    def mean(self) -> np.ndarray:
        return self.modes.mean(axis=0)

    @property
    def cov(self) -> np.ndarray:
        centered = self.modes - self.mean
        return np.eye(self.dim) + centered.T @ centered / self.modes.shape[0]

    def score(self, X: np.ndarray) -> np.ndarray:
        """Gradient of the log density at each row of X."""
        diff = self.modes[None, :, :] - X[:, None, :]
        resp = softmax(-0.5 * (diff ** 2).sum(axis=2), axis=1)
        return (resp[:, :, None] * diff).sum(axis=1)


TARGETS = {
    "gauss1d": BenchTarget("gauss1d", np.array([[0.0]])),
    "mixture2-1d": BenchTarget("mixture2-1d", np.array([[-2.0], [2.0]])),
    "mixture2-2d": BenchTarget("mixture2-2d", np.array([[-2.0, 0.0], [2.0, 0.0]])),
}


def get_target(name: str) -> BenchTarget:
    try:
        return TARGETS[name]
    except KeyError:
        raise BenchTargetError("Unknown target {!r}, use one of: {}.".format(
            name, ", ".join(sorted(TARGETS)))) from None


@dataclass
class BenchReport:
    target: str
    n: int
    steps: int
    step_size: float
    mean: np.ndarray
    var: np.ndarray
    target_mean: np.ndarray
    target_var: np.ndarray
    mode_counts: List[int] = field(default_factory=list)

    @property
    def mean_error(self) -> float:
        return float(np.abs(self.mean - self.target_mean).max())

    @property
    def var_rel_error(self) -> float:
        return float((np.abs(self.var - self.target_var) / self.target_var).max())

    def format(self) -> str:
        return ("target {}: n={} steps={} step={}\n"
                "  mean {} (target {})\n"
                "  var  {} (target {})\n"
                "  particles near each mode: {}").format(
                    self.target, self.n, self.steps, self.step_size,
                    np.round(self.mean, 4).tolist(), self.target_mean.tolist(),
                    np.round(self.var, 4).tolist(), self.target_var.tolist(),
                    self.mode_counts)


def svgd_bench(target_name: str, n: int = 50, steps: int = 2000, step_size: float = 0.05,
               rng: np.random.Generator = None, init_scale: float = 1.0,
               kernel_config: KernelConfig = KernelConfig(), mirrored: bool = True,
               init: Optional[np.ndarray] = None) -> BenchReport:
    """Run SVGD from N(0, init_scale^2) particles and compare moments.

    With `mirrored` the initial particles are drawn in pairs (x, -x), so the
    sample starts centered. Turn it off to check that the sampler itself
    balances the modes. An explicit `init` array of shape (n, dim) replaces
    the random draw.
    """
    target = get_target(target_name)
    if n < 1 or steps < 0 or not step_size > 0:
        raise InvalidInputError("Need n >= 1, steps >= 0 and a positive step size.")
    rng = np.random.default_rng(0) if rng is None else rng
    if init is not None:
        X = np.array(init, dtype=np.float64)
        if X.shape != (n, target.dim):
            raise InvalidInputError("init must have shape ({}, {}), got {}.".format(
                n, target.dim, X.shape))
    elif mirrored:
        half = rng.normal(0.0, init_scale, size=(n // 2, target.dim))
        X = np.concatenate([half, -half, np.zeros((n % 2, target.dim))])
    else:
        X = rng.normal(0.0, init_scale, size=(n, target.dim))
    X = run_svgd(X, target.score, steps, step_size, kernel_config)
    dist = np.linalg.norm(X[:, None, :] - target.modes[None, :, :], axis=2)
    report = BenchReport(
        target=target.name, n=n, steps=steps, step_size=step_size,
        mean=X.mean(axis=0), var=X.var(axis=0),
        target_mean=target.mean, target_var=np.diag(target.cov).copy(),
        mode_counts=[int(c) for c in (dist < MODE_RADIUS).sum(axis=0)],
    )
    logging.info("svgd bench {}: mean error {:.4f}, variance error {:.3f}".format(
        target.name, report.mean_error, report.var_rel_error))
    return report

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

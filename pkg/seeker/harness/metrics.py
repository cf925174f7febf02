# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Per-epoch training metrics and the particle diversity measure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from ..core.exceptions import InvalidInputError
from ..policy import ParticleEnsemble


@dataclass(frozen=True)
class MetricsRow:
    epoch: int
    mean_extrinsic_reward: float
    mean_shaped_reward: float
    success_rate: float
    mean_intrinsic_gain: float
    avg_pairwise_particle_distance: float
    answerer_train_accuracy: float
    eta: float
    wall_clock_seconds: Optional[float] = None

    FIELDS = ("epoch", "mean_extrinsic_reward", "mean_shaped_reward", "success_rate",
              "mean_intrinsic_gain", "avg_pairwise_particle_distance",
              "answerer_train_accuracy", "eta")
    TIMING = "wall_clock_seconds"

    def __post_init__(self):
        if not (0.0 <= self.success_rate <= 1.0):
            raise InvalidInputError("success_rate out of [0, 1]: {}".format(self.success_rate))
        if self.avg_pairwise_particle_distance < 0:
            raise InvalidInputError("Negative particle distance.")

    @classmethod
    def columns(cls, include_timing: bool = False) -> Tuple[str, ...]:
        return cls.FIELDS + (cls.TIMING,) if include_timing else cls.FIELDS

    def values(self, include_timing: bool = False) -> Tuple:
        return tuple(getattr(self, name) for name in self.columns(include_timing))

    def formatted(self, include_timing: bool = False) -> Tuple[str, ...]:
        return tuple(_format(v) for v in self.values(include_timing))


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def avg_pairwise_distance(ensemble: ParticleEnsemble) -> float:
    """Mean Frobenius distance over unordered particle pairs; 0 for n < 2."""
    if len(ensemble) < 2:
        return 0.0
    return float(pdist(ensemble.flat()).mean())

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Comparison methods, expressed as changes to a run configuration.

random
    One particle fixed at zero: uniform random questions, never updated.
reinforce
    A single policy trained with plain REINFORCE: one particle, no
    intrinsic reward, flat prior.
entropy-only
    The particle ensemble without the intrinsic gain reward.
"""

import math

from ..core.constants import Selection
from ..core.exceptions import ConfigValueError
from ..core.types import RunConfig

NONE = "none"


def _random(config: RunConfig) -> RunConfig:
    return config.replace(n_particles=1, init_scale=0.0, step_theta=0.0, eta0=0.0,
                          intrinsic=False, svgd_adaptive=False,
                          rollout_selection=Selection.SAMPLE)


def _reinforce(config: RunConfig) -> RunConfig:
    return config.replace(n_particles=1, eta0=0.0, intrinsic=False, prior_sigma=math.inf,
                          rollout_selection=Selection.SAMPLE)


def _entropy_only(config: RunConfig) -> RunConfig:
    return config.replace(eta0=0.0, intrinsic=False)


BASELINES = {
    "random": _random,
    "reinforce": _reinforce,
    "entropy-only": _entropy_only,
}


def get_baseline_names():
    return sorted(BASELINES)


def apply_baseline(config: RunConfig, name) -> RunConfig:
    """Return `config` changed to run baseline `name`. None or "none" leaves
    it alone.
    """
    if name is None or name == NONE:
        return config
    try:
        return BASELINES[name](config)
    except KeyError:
        raise ConfigValueError("Unknown baseline {!r}, use one of: {}.".format(
            name, ", ".join(get_baseline_names()))) from None

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

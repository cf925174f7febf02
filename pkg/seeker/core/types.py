# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Domain types shared by the whole package: the attribute schema, scenes,
queries, dialog states, trajectories and run configuration.

All of these are immutable value objects, except `Trajectory` which is built
up step by step while an episode is played. Numpy arrays held by the frozen
types are marked read-only.
"""

from __future__ import annotations

import math
import dataclasses
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import (Answer, UtilityKind, Selection, AnswererObjective,
                        CONSISTENCY_EPS, MEDIAN)
from .exceptions import InvalidInputError, ConfigValueError, ConfigTypeError


DEFAULT_SCHEMA = {
    "color": ["red", "green", "blue"],
    "shape": ["cube", "sphere", "cylinder"],
    "size": ["small", "large"],
}


def _frozen_array(arr, dtype=np.float64):
    arr = np.array(arr, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AttributeSchema:
    """Names of the object attributes and the value labels of each.

    The query vocabulary is every (attribute, value) pair, numbered
    attribute-major: offset(attribute) + value.
    """
    attributes: Tuple[str, ...]
    values: Tuple[Tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(str(a) for a in self.attributes))
        object.__setattr__(self, "values",
                           tuple(tuple(str(v) for v in vals) for vals in self.values))
        if len(self.attributes) < 1:
            raise InvalidInputError("A schema needs at least one attribute.")
        if len(self.values) != len(self.attributes):
            raise InvalidInputError("Schema has {} attributes but {} value lists.".format(
                len(self.attributes), len(self.values)))
        for name, vals in zip(self.attributes, self.values):
            if len(vals) < 2:
                raise InvalidInputError(
                    "Attribute {!r} needs at least two values.".format(name))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Sequence[str]]) -> "AttributeSchema":
        """Build from an ordered mapping such as `{"color": ["red", "blue"]}`."""
        if not isinstance(mapping, Mapping):
            raise InvalidInputError("Schema must be a mapping of attribute to values.")
        return cls(tuple(mapping.keys()), tuple(tuple(v) for v in mapping.values()))

    @classmethod
    def from_sizes(cls, *sizes: int) -> "AttributeSchema":
        """Anonymous schema with the given number of values per attribute."""
        return cls(tuple("a{}".format(i) for i in range(len(sizes))),
                   tuple(tuple("v{}".format(j) for j in range(n)) for n in sizes))

    def to_mapping(self):
        return {name: list(vals) for name, vals in zip(self.attributes, self.values)}

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @cached_property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(v) for v in self.values)

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        offs = [0]
        for n in self.sizes[:-1]:
            offs.append(offs[-1] + n)
        return tuple(offs)

    @property
    def vocab_size(self) -> int:
        return sum(self.sizes)

    @property
    def n_signatures(self) -> int:
        return reduce(lambda a, b: a * b, self.sizes, 1)

    @property
    def feature_dim(self) -> int:
        """Dimension of the dialog state features: value frequencies, signed
        history, bias.
        """
        return 2 * self.vocab_size + 1

    def value_index(self, attribute: str, label: str) -> Tuple[int, int]:
        try:
            ai = self.attributes.index(attribute)
            return ai, self.values[ai].index(label)
        except ValueError:
            raise InvalidInputError("No value {!r} for attribute {!r}.".format(
                label, attribute)) from None

    def check_value(self, attribute: int, value: int):
        if not (0 <= attribute < self.n_attributes):
            raise InvalidInputError("Attribute index {} out of range.".format(attribute))
        if not (0 <= value < self.sizes[attribute]):
            raise InvalidInputError("Value index {} out of range for {!r}.".format(
                value, self.attributes[attribute]))


@dataclass(frozen=True)
class SceneObject:
    """A candidate object: its id and one value index per attribute."""
    id: int
    attribute_values: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "attribute_values", tuple(int(v) for v in self.attribute_values))
        if self.id < 0:
            raise InvalidInputError("Object id must be non-negative.")


@dataclass(frozen=True)
class Scene:
    """The world the seeker queries: candidate objects and the hidden target.

    `target_index` is a position in `objects`; only the oracle and evaluation
    code may look at it.
    """
    schema: AttributeSchema
    objects: Tuple[SceneObject, ...]
    target_index: int

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if len(self.objects) < 2:
            raise InvalidInputError("A scene needs at least two objects.")
        if not (0 <= self.target_index < len(self.objects)):
            raise InvalidInputError("Target index {} out of range.".format(self.target_index))
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise InvalidInputError("Object ids must be unique within a scene.")
        for obj in self.objects:
            if len(obj.attribute_values) != self.schema.n_attributes:
                raise InvalidInputError("Object {} does not match the schema.".format(obj.id))
            for ai, vi in enumerate(obj.attribute_values):
                self.schema.check_value(ai, vi)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def target(self) -> SceneObject:
        return self.objects[self.target_index]

    @cached_property
    def value_matrix(self) -> np.ndarray:
        """Object by attribute matrix of value indices."""
        return _frozen_array([o.attribute_values for o in self.objects], dtype=np.int64)

    @cached_property
    def ids(self) -> np.ndarray:
        return _frozen_array([o.id for o in self.objects], dtype=np.int64)

    def target_is_unique(self) -> bool:
        sig = self.target.attribute_values
        return sum(1 for o in self.objects if o.attribute_values == sig) == 1

    def with_target(self, target_index: int) -> "Scene":
        return dataclasses.replace(self, target_index=target_index)


@dataclass(frozen=True, order=True)
class Query:
    """Ask whether the target has `value` for `attribute`."""
    attribute: int
    value: int

    def describe(self, schema: AttributeSchema) -> str:
        return "{}={}".format(schema.attributes[self.attribute],
                              schema.values[self.attribute][self.value])


HistoryItem = Tuple[Query, Answer]


@dataclass(frozen=True, eq=False)
class DialogState:
    """The seeker's view at one round: scene summary, dialog so far and the
    fixed-size feature vector used by policies and the answerer model.
    """
    scene_features: np.ndarray
    history: Tuple[HistoryItem, ...]
    round: int
    feature_vector: np.ndarray

    @property
    def dim(self) -> int:
        return self.feature_vector.shape[0]


@dataclass(frozen=True, eq=False)
class Step:
    """One round of a played episode."""
    state: DialogState
    query: Query
    answer: Answer
    extrinsic_reward: float
    intrinsic_gain: float
    shaped_reward: float


@dataclass(eq=False)
class Trajectory:
    """A played episode. Filled in round by round; `guess` and `success` are
    set when the episode ends.
    """
    steps: list = field(default_factory=list)
    guess: Optional[int] = None
    success: bool = False

    def __len__(self):
        return len(self.steps)

    @property
    def extrinsic_rewards(self) -> np.ndarray:
        return np.array([s.extrinsic_reward for s in self.steps], dtype=np.float64)

    @property
    def shaped_rewards(self) -> np.ndarray:
        return np.array([s.shaped_reward for s in self.steps], dtype=np.float64)

    @property
    def intrinsic_gains(self) -> np.ndarray:
        return np.array([s.intrinsic_gain for s in self.steps], dtype=np.float64)

    @property
    def total_extrinsic(self) -> float:
        return float(self.extrinsic_rewards.sum())


@dataclass(frozen=True)
class GameConfig:
    """Parameters of the synthetic guessing game."""
    n_objects: int = 8
    schema: AttributeSchema = field(
        default_factory=lambda: AttributeSchema.from_mapping(DEFAULT_SCHEMA))
    T_max: int = 5
    oracle_noise: float = 0.0
    r_success: float = 1.0
    r_fail: float = 0.0
    question_penalty: float = 0.0
    consistency_eps: float = CONSISTENCY_EPS
    scene_pool: int = 0

    def __post_init__(self):
        if self.n_objects < 2:
            raise ConfigValueError("game.n_objects must be at least 2.")
        if self.T_max < 1:
            raise ConfigValueError("game.T_max must be at least 1.")
        if not (0.0 <= self.oracle_noise < 1.0):
            raise ConfigValueError("game.oracle_noise must be in [0, 1).")
        if not (0.0 < self.consistency_eps < 0.5):
            raise ConfigValueError("game.consistency_eps must be in (0, 0.5).")
        if self.scene_pool < 0:
            raise ConfigValueError("game.scene_pool must not be negative.")


Bandwidth = Union[float, str]


@dataclass(frozen=True)
class RunConfig:
    """Everything a training run needs. Defaults are the published settings
    where there are any.
    """
    n_particles: int = 10
    gamma: float = 0.99
    alpha: float = 0.01
    beta: float = 1.0
    eta0: float = 0.1
    epochs: int = 60
    episodes_per_epoch: int = 32
    step_theta: float = 0.02
    step_omega: float = 1e-3
    utility_kind: UtilityKind = UtilityKind.ENTROPY
    prior_sigma: float = 10.0
    answer_samples: int = 16
    seed: int = 0
    init_scale: float = 0.1
    baseline_decay: float = 0.9
    intrinsic: bool = True
    rollout_selection: Selection = Selection.SAMPLE
    candidates_per_particle: int = 2
    bandwidth: Bandwidth = MEDIAN
    svgd_adaptive: bool = False
    svgd_adaptive_decay: float = 0.9
    svgd_fudge: float = 1e-6
    answerer_objective: AnswererObjective = AnswererObjective.ANSWER
    answerer_updates: int = 1
    checkpoint_every: int = 10
    game: GameConfig = field(default_factory=GameConfig)

    def __post_init__(self):
        for name in ("n_particles", "episodes_per_epoch",
                     "candidates_per_particle", "answerer_updates"):
            if getattr(self, name) < 1:
                raise ConfigValueError("{} must be at least 1.".format(name))
        if self.answer_samples < 2:
            raise ConfigValueError("answer_samples must be at least 2.")
        if self.epochs < 0:
            raise ConfigValueError("epochs must not be negative.")
        if not (0.0 <= self.gamma <= 1.0):
            raise ConfigValueError("gamma must be in [0, 1].")
        for name in ("alpha", "beta", "prior_sigma"):
            if not getattr(self, name) > 0:
                raise ConfigValueError("{} must be positive.".format(name))
        for name in ("eta0", "step_theta", "step_omega", "init_scale", "svgd_fudge"):
            if getattr(self, name) < 0:
                raise ConfigValueError("{} must not be negative.".format(name))
        if not (0.0 <= self.baseline_decay < 1.0):
            raise ConfigValueError("baseline_decay must be in [0, 1).")
        if not (0.0 <= self.svgd_adaptive_decay < 1.0):
            raise ConfigValueError("svgd_adaptive_decay must be in [0, 1).")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != MEDIAN:
                raise ConfigValueError("bandwidth must be a positive number or 'median'.")
        elif not self.bandwidth > 0:
            raise ConfigValueError("bandwidth must be a positive number or 'median'.")

    @property
    def T_max(self) -> int:
        return self.game.T_max

    @property
    def flat_prior(self) -> bool:
        return math.isinf(self.prior_sigma)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_config(cls, cf: Mapping) -> "RunConfig":
        """Build from the nested configuration tree (see config_default.yaml).
        """
        try:
            game = cf["game"]
            schema = AttributeSchema.from_mapping(game["schema"])
            gamecf = GameConfig(
                n_objects=int(game["n_objects"]),
                schema=schema,
                T_max=int(game["T_max"]),
                oracle_noise=float(game["oracle_noise"]),
                r_success=float(game["r_success"]),
                r_fail=float(game["r_fail"]),
                question_penalty=float(game["question_penalty"]),
                consistency_eps=float(game["consistency_eps"]),
                scene_pool=int(game["scene_pool"]),
            )
            skr, rl, gain = cf["seeker"], cf["rl"], cf["gain"]
            ans, svgd = cf["answerer"], cf["svgd"]
            bandwidth = svgd["bandwidth"]
            if not isinstance(bandwidth, str):
                bandwidth = float(bandwidth)
            prior_sigma = skr["prior_sigma"]
            prior_sigma = math.inf if prior_sigma is None else float(prior_sigma)
            return cls(
                n_particles=int(skr["n_particles"]),
                init_scale=float(skr["init_scale"]),
                prior_sigma=prior_sigma,
                gamma=float(rl["gamma"]),
                alpha=float(rl["alpha"]),
                epochs=int(rl["epochs"]),
                episodes_per_epoch=int(rl["episodes_per_epoch"]),
                step_theta=float(rl["step_theta"]),
                baseline_decay=float(rl["baseline_decay"]),
                rollout_selection=Selection.from_name(rl["rollout_selection"]),
                candidates_per_particle=int(rl["candidates_per_particle"]),
                checkpoint_every=int(rl["checkpoint_every"]),
                beta=float(gain["beta"]),
                eta0=float(gain["eta0"]),
                intrinsic=bool(gain["intrinsic"]),
                utility_kind=UtilityKind.from_name(gain["utility"]),
                answer_samples=int(gain["answer_samples"]),
                step_omega=float(ans["step_omega"]),
                answerer_objective=AnswererObjective.from_name(ans["objective"]),
                answerer_updates=int(ans["updates_per_epoch"]),
                bandwidth=bandwidth,
                svgd_adaptive=bool(svgd["adaptive"]),
                svgd_adaptive_decay=float(svgd["adaptive_decay"]),
                svgd_fudge=float(svgd["fudge"]),
                seed=int(cf["seed"]),
                game=gamecf,
            )
        except KeyError as kerr:
            raise ConfigValueError("Missing configuration key: {}".format(kerr)) from kerr
        except (TypeError, ValueError) as err:
            raise ConfigTypeError("Bad configuration value: {}".format(err)) from err

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

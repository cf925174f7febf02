# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""The synthetic guessing game.

A scene is a handful of objects with random attribute values, one of which
is the hidden target. The seeker asks T_max yes/no attribute queries, the
oracle answers them truthfully (or flips the answer with probability
p_flip), and then the executor guesses. Every generated scene has a target
whose attribute signature no other object shares, so every game is winnable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import executor
from .core.constants import Answer
from .core.exceptions import InvalidStateError, ConfigValueError, InvalidInputError
from .core.features import featurize
from .core.types import (GameConfig, AttributeSchema, Scene, SceneObject, Query,
                         DialogState, HistoryItem, Trajectory)

__all__ = ["GameConfig", "generate_scene", "redraw_target", "oracle_answer", "Episode",
           "step", "ScenePool", "scene_to_record", "scene_from_record", "episode_to_record"]

# Rejection sampling gives up after this many draws.
MAX_DRAWS = 10000


def generate_scene(config: GameConfig, rng: np.random.Generator) -> Scene:
    """Draw a scene with uniform attribute values and a uniform target
    position, redrawing until the target's signature is unique.
    """
    schema = config.schema
    if schema.n_signatures < config.n_objects:
        raise ConfigValueError("Schema admits {} distinct objects, {} requested.".format(
            schema.n_signatures, config.n_objects))
    n = config.n_objects
    for _ in range(MAX_DRAWS):
        values = np.column_stack([rng.integers(size, size=n) for size in schema.sizes])
        target = int(rng.integers(n))
        matches = (values == values[target]).all(axis=1)
        if matches.sum() == 1:
            objects = tuple(SceneObject(i, tuple(row)) for i, row in enumerate(values.tolist()))
            return Scene(schema=schema, objects=objects, target_index=target)
    raise ConfigValueError("No scene with a unique target after {} draws.".format(MAX_DRAWS))


def unique_positions(scene: Scene) -> List[int]:
    """Positions of the objects whose signature is unique in the scene."""
    values = scene.value_matrix
    return [i for i in range(scene.n_objects)
            if (values == values[i]).all(axis=1).sum() == 1]


def redraw_target(scene: Scene, rng: np.random.Generator) -> Scene:
    """Same objects, new target: uniform over the other uniquely identifiable
    objects, or the current one when there is no other.
    """
    choices = [i for i in unique_positions(scene) if i != scene.target_index]
    if not choices:
        return scene
    return scene.with_target(choices[int(rng.integers(len(choices)))])


def oracle_answer(scene: Scene, query: Query, rng: np.random.Generator,
                  p_flip: float = 0.0) -> Answer:
    """Truthful Yes/No about the target, flipped with probability p_flip.

    One uniform is drawn per answer whatever p_flip is.
    """
    scene.schema.check_value(query.attribute, query.value)
    truth = scene.target.attribute_values[query.attribute] == query.value
    if rng.random() < p_flip:
        truth = not truth
    return Answer.YES if truth else Answer.NO


@dataclass
class Episode:
    """One game in progress."""
    scene: Scene
    config: GameConfig
    history: List[HistoryItem] = field(default_factory=list)
    round: int = 0
    done: bool = False
    guess: Optional[int] = None

    @property
    def success(self) -> bool:
        return self.done and self.guess == self.scene.target.id

    def state(self) -> DialogState:
        return featurize(self.scene, self.history)


def step(episode: Episode, query: Query, rng: np.random.Generator) -> Tuple[Answer, float, bool]:
    """Ask `query`, returning the answer, the extrinsic reward and whether the
    episode is over. The executor guesses when the question budget is spent.
    """
    if episode.done:
        raise InvalidStateError("Episode is already finished.")
    cf = episode.config
    answer = oracle_answer(episode.scene, query, rng, cf.oracle_noise)
    episode.history.append((query, answer))
    episode.round += 1
    reward = -cf.question_penalty
    if episode.round >= cf.T_max:
        episode.guess = executor.guess(episode.scene, episode.history, cf.consistency_eps)
        episode.done = True
        reward += cf.r_success if episode.success else cf.r_fail
    return answer, reward, episode.done


class ScenePool:
    """A fixed set of scenes. Drawing from it with a new target gives the
    "new object" evaluation split; fresh scenes give the "new image" split.
    """

    def __init__(self, config: GameConfig, rng: np.random.Generator, size: int):
        if size < 1:
            raise ConfigValueError("A scene pool needs at least one scene.")
        self.scenes = [generate_scene(config, rng) for _ in range(size)]

    def __len__(self):
        return len(self.scenes)

    def draw(self, rng: np.random.Generator) -> Scene:
        return self.scenes[int(rng.integers(len(self.scenes)))]

    def draw_new_object(self, rng: np.random.Generator) -> Scene:
        return redraw_target(self.draw(rng), rng)


# Replay records

def scene_to_record(scene: Scene) -> dict:
    return {
        "schema": scene.schema.to_mapping(),
        "attributes": list(scene.schema.attributes),
        "objects": [{"id": o.id, "values": list(o.attribute_values)} for o in scene.objects],
        "target_index": scene.target_index,
    }


def scene_from_record(record: dict) -> Scene:
    try:
        mapping = record["schema"]
        order = record.get("attributes", list(mapping.keys()))
        schema = AttributeSchema(tuple(order), tuple(tuple(mapping[a]) for a in order))
        objects = tuple(SceneObject(o["id"], tuple(o["values"])) for o in record["objects"])
        return Scene(schema=schema, objects=objects, target_index=int(record["target_index"]))
    except (KeyError, TypeError) as err:
        raise InvalidInputError("Malformed scene record: {}".format(err)) from err


def episode_to_record(episode: Episode, trajectory: Optional[Trajectory] = None) -> dict:
    rec = {
        "scene": scene_to_record(episode.scene),
        "history": [[q.attribute, q.value, a.name] for q, a in episode.history],
        "guess": episode.guess,
        "success": episode.success,
    }
    if trajectory is not None:
        rec["extrinsic_rewards"] = trajectory.extrinsic_rewards.tolist()
        rec["intrinsic_gains"] = trajectory.intrinsic_gains.tolist()
    return rec


def history_from_record(record: dict) -> List[HistoryItem]:
    return [(Query(int(a), int(v)), Answer.from_name(name)) for a, v, name in record["history"]]

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
pytest configuration and common code lives here.
"""

import numpy as np
import pytest

from seeker import config
from seeker.core.types import AttributeSchema, GameConfig, RunConfig, Scene, SceneObject


def make_scene(schema, rows, target_index=0, ids=None):
    """Scene from a list of value tuples."""
    ids = range(len(rows)) if ids is None else ids
    objects = tuple(SceneObject(i, tuple(row)) for i, row in zip(ids, rows))
    return Scene(schema=schema, objects=objects, target_index=target_index)


def tiny_run_config(**changes):
    """A run small enough to train in a second or two."""
    game = GameConfig(n_objects=4, schema=AttributeSchema.from_sizes(2, 2, 2), T_max=2)
    base = dict(n_particles=2, epochs=2, episodes_per_epoch=3, answer_samples=3,
                candidates_per_particle=1, checkpoint_every=1, seed=7, game=game)
    base.update(changes)
    return RunConfig(**base)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def schema():
    return AttributeSchema.from_mapping({
        "color": ["red", "green", "blue"],
        "shape": ["cube", "sphere", "cylinder"],
        "size": ["small", "large"],
    })


@pytest.fixture
def small_schema():
    return AttributeSchema.from_sizes(2, 2)


@pytest.fixture
def scene4(schema):
    """Four objects; the target (position 0) is the only large red cube."""
    return make_scene(schema, [(0, 0, 1), (0, 1, 0), (1, 0, 0), (2, 2, 1)], target_index=0)


@pytest.fixture
def fresh_config():
    config.reset_config()
    yield
    config.reset_config()

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab:fileencoding=utf-8

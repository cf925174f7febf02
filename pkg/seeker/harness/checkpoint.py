# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Checkpoint directory layout.

    OUT/checkpoints/
        latest                  name of the newest checkpoint directory
        epoch_0009/
            particles.npy       (n, |Q|, d)
            answerer.npy        (3, d + |Q|)
            state.json          epoch, baselines, generator states, config hash
"""

import os

from .. import json
from .. import logging
from ..answerer import AnswererModel
from ..core.exceptions import CheckpointError
from ..core.types import AttributeSchema
from ..policy import ParticleEnsemble

PARTICLES = "particles.npy"
ANSWERER = "answerer.npy"
STATE = "state.json"
LATEST = "latest"


def checkpoint_root(out_dir: str) -> str:
    return os.path.join(out_dir, "checkpoints")


def save_checkpoint(out_dir: str, name: str, ensemble: ParticleEnsemble,
                    answerer: AnswererModel, state: dict, mark_latest: bool = True) -> str:
    """Write a checkpoint directory and return its path."""
    path = os.path.join(checkpoint_root(out_dir), name)
    try:
        os.makedirs(path, exist_ok=True)
        ensemble.save(os.path.join(path, PARTICLES))
        answerer.save(os.path.join(path, ANSWERER))
        with open(os.path.join(path, STATE), "w", encoding="utf8") as fo:
            json.dump(state, fo)
        if mark_latest:
            with open(os.path.join(checkpoint_root(out_dir), LATEST), "w") as fo:
                fo.write(name + "\n")
    except OSError as err:
        raise CheckpointError("Could not write checkpoint {!r}.".format(path)) from err
    logging.info("checkpoint saved: {}".format(path))
    return path


def latest_checkpoint(out_dir: str):
    """Path of the newest checkpoint, or None if there is none."""
    fname = os.path.join(checkpoint_root(out_dir), LATEST)
    if not os.path.exists(fname):
        return None
    with open(fname) as fo:
        name = fo.read().strip()
    return os.path.join(checkpoint_root(out_dir), name) if name else None


def load_checkpoint(path: str, schema: AttributeSchema):
    """Read a checkpoint directory: (ensemble, answerer, state)."""
    if not os.path.isdir(path):
        raise CheckpointError("No checkpoint directory {!r}.".format(path))
    ensemble = ParticleEnsemble.load(os.path.join(path, PARTICLES), schema)
    answerer = AnswererModel.load(os.path.join(path, ANSWERER), schema)
    try:
        state = json.from_file(os.path.join(path, STATE))
    except (OSError, ValueError) as err:
        raise CheckpointError("Bad checkpoint state in {!r}.".format(path)) from err
    return ensemble, answerer, state

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

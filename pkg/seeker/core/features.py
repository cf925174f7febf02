# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Query token numbering and the dialog state encoder.

The feature vector of a dialog state is laid out as

    [ value frequencies (|Q|) | signed answer history (|Q|) | 1 ]

The frequency block holds, for every query token (attribute, value), the
fraction of scene objects that have that value. The history block holds +1
for a token answered Yes, -1 for No and 0 when unasked or answered NA. When a
token was asked more than once the latest answer wins.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .constants import Answer
from .exceptions import InvalidInputError
from .types import AttributeSchema, Scene, Query, DialogState, HistoryItem, _frozen_array


_SIGN = {Answer.YES: 1.0, Answer.NO: -1.0, Answer.NA: 0.0}


def token_id(query: Query, schema: AttributeSchema) -> int:
    """Flat token number of a query."""
    schema.check_value(query.attribute, query.value)
    return schema.offsets[query.attribute] + query.value


def query_of_token(tid: int, schema: AttributeSchema) -> Query:
    """Inverse of `token_id`."""
    tid = int(tid)
    if not (0 <= tid < schema.vocab_size):
        raise InvalidInputError("Token id {} out of range [0, {}).".format(tid, schema.vocab_size))
    offsets = schema.offsets
    attribute = int(np.searchsorted(offsets, tid, side="right")) - 1
    return Query(attribute, tid - offsets[attribute])


def all_queries(schema: AttributeSchema) -> list:
    """Every query of the vocabulary, in token order."""
    return [query_of_token(i, schema) for i in range(schema.vocab_size)]


def scene_features(scene: Scene) -> np.ndarray:
    """Per-token fraction of objects having that attribute value."""
    schema = scene.schema
    values = scene.value_matrix
    counts = [np.bincount(values[:, ai], minlength=n) for ai, n in enumerate(schema.sizes)]
    return np.concatenate(counts).astype(np.float64) / scene.n_objects


def history_features(history: Iterable[HistoryItem], schema: AttributeSchema) -> np.ndarray:
    block = np.zeros(schema.vocab_size, dtype=np.float64)
    for query, answer in history:
        block[token_id(query, schema)] = _SIGN[Answer(answer)]
    return block


def featurize(scene: Scene, history: Sequence[HistoryItem]) -> DialogState:
    """Encode the dialog state of `scene` after `history`.

    A pure function of its arguments. Raises InvalidInputError if a history
    query does not belong to the scene's schema.
    """
    history = tuple((q, Answer(a)) for q, a in history)
    sf = scene_features(scene)
    hf = history_features(history, scene.schema)
    phi = np.concatenate([sf, hf, [1.0]])
    return DialogState(scene_features=_frozen_array(sf), history=history,
                       round=len(history), feature_vector=_frozen_array(phi))

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

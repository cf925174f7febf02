# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Goal executor: a smoothed consistency filter over the scene's objects.

Each answered query multiplies an object's weight by 1 - eps when the object
agrees with the answer and by eps when it does not. NA answers leave all
weights alone. The weight of an object is therefore

    (1 - eps) ** n_consistent * eps ** n_inconsistent

up to normalization. Weights are kept as logs and normalized with a softmax,
so long contradictory histories cannot underflow. Objects with equal counts
get bit-identical probabilities. A duplicate history item counts twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import softmax

from .core.constants import Answer, CONSISTENCY_EPS
from .core.exceptions import InvalidInputError
from .core.types import Scene, Query, HistoryItem


@dataclass(frozen=True, eq=False)
class GoalPosterior:
    """Probability of each scene object (by position) being the target."""
    probs: np.ndarray
    ids: np.ndarray

    def __len__(self):
        return self.probs.shape[0]

    def top(self) -> int:
        """Position of the most probable object, ties to the lowest id."""
        best = np.flatnonzero(self.probs == self.probs.max())
        return int(best[np.argmin(self.ids[best])])

    def top_id(self) -> int:
        return int(self.ids[self.top()])


def consistency_counts(scene: Scene, history: Sequence[HistoryItem]):
    """Per object counts of history items it agrees and disagrees with."""
    values = scene.value_matrix
    agree = np.zeros(scene.n_objects, dtype=np.int64)
    disagree = np.zeros(scene.n_objects, dtype=np.int64)
    for query, answer in history:
        answer = Answer(answer)
        if answer is Answer.NA:
            continue
        scene.schema.check_value(query.attribute, query.value)
        has = values[:, query.attribute] == query.value
        ok = has if answer is Answer.YES else ~has
        agree += ok
        disagree += ~ok
    return agree, disagree


def candidate_posterior(scene: Scene, history: Sequence[HistoryItem],
                        eps: float = CONSISTENCY_EPS) -> GoalPosterior:
    if not (0.0 < eps < 1.0):
        raise InvalidInputError("Consistency smoothing must be in (0, 1).")
    agree, disagree = consistency_counts(scene, history)
    log_weights = agree * np.log1p(-eps) + disagree * np.log(eps)
    probs = softmax(log_weights)
    return GoalPosterior(probs=probs, ids=scene.ids)


def guess(scene: Scene, history: Sequence[HistoryItem], eps: float = CONSISTENCY_EPS) -> int:
    """Id of the object the executor picks after `history`."""
    return candidate_posterior(scene, history, eps).top_id()


def executor_score(scene: Scene, history: Sequence[HistoryItem],
                   hypothetical: HistoryItem, target: Optional[int] = None,
                   eps: float = CONSISTENCY_EPS) -> float:
    """Goal probability after appending a hypothetical (query, answer).

    It is read at position `target` when given, otherwise at the executor's
    current top candidate for `history` alone.
    """
    query, answer = hypothetical
    if not isinstance(query, Query):
        raise InvalidInputError("Hypothetical must be a (Query, Answer) pair.")
    if target is None:
        target = candidate_posterior(scene, history, eps).top()
    elif not (0 <= target < scene.n_objects):
        raise InvalidInputError("Target position {} out of range.".format(target))
    after = candidate_posterior(scene, list(history) + [(query, Answer(answer))], eps)
    return float(after.probs[target])

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""The seeker's model of the answerer.

A softmax-linear classifier over {Yes, No, NA} with input
[phi(state); one_hot(query)]. It is trained online, either to imitate the
oracle's observed answers or to maximize the executor's expected probability
of the true target under its predicted answers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import softmax, log_softmax

from .core.constants import Answer, AnswererObjective, N_ANSWERS
from .core.exceptions import InvalidInputError, NumericError, CheckpointError
from .core.features import token_id, all_queries
from .core.types import AttributeSchema, DialogState, Query
from .policy import ParticleEnsemble, action_probs, sample_query


class AnswererModel:
    """Answer logits omega of shape (3, feature_dim + vocab_size)."""

    def __init__(self, omega: np.ndarray, schema: AttributeSchema):
        omega = np.array(omega, dtype=np.float64)
        shape = (N_ANSWERS, schema.feature_dim + schema.vocab_size)
        if omega.shape != shape:
            raise InvalidInputError("omega has shape {}, need {}.".format(omega.shape, shape))
        self.omega = omega
        self.schema = schema

    def __repr__(self):
        return "{}(shape={})".format(self.__class__.__name__, self.omega.shape)

    @classmethod
    def zeros(cls, schema: AttributeSchema) -> "AnswererModel":
        return cls(np.zeros((N_ANSWERS, schema.feature_dim + schema.vocab_size)), schema)

    def copy(self) -> "AnswererModel":
        return self.__class__(self.omega.copy(), self.schema)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.omega).all())

    def save(self, path: str):
        try:
            np.save(path, self.omega, allow_pickle=False)
        except OSError as err:
            raise CheckpointError("Could not write answerer to {!r}.".format(path)) from err

    @classmethod
    def load(cls, path: str, schema: AttributeSchema) -> "AnswererModel":
        if not os.path.exists(path):
            raise CheckpointError("No answerer file {!r}.".format(path))
        try:
            return cls(np.load(path, allow_pickle=False), schema)
        except InvalidInputError as err:
            raise CheckpointError("Answerer file {!r} does not match the schema.".format(
                path)) from err


def answer_features(state: DialogState, query: Query, schema: AttributeSchema) -> np.ndarray:
    onehot = np.zeros(schema.vocab_size)
    onehot[token_id(query, schema)] = 1.0
    return np.concatenate([state.feature_vector, onehot])


def _inputs(model: AnswererModel, state: DialogState, query: Query) -> np.ndarray:
    if state.feature_vector.shape != (model.schema.feature_dim,):
        raise InvalidInputError("State dimension {} does not match the answerer's {}.".format(
            state.feature_vector.shape[0], model.schema.feature_dim))
    return answer_features(state, query, model.schema)


def predict_answer_dist(model: AnswererModel, state: DialogState, query: Query) -> np.ndarray:
    """p(answer | query, state), indexed by `Answer`."""
    return softmax(model.omega @ _inputs(model, state, query))


def modal_answer(model: AnswererModel, state: DialogState, query: Query) -> Answer:
    return Answer(int(np.argmax(predict_answer_dist(model, state, query))))


def marginal_answer_dist(ensemble: ParticleEnsemble, model: AnswererModel, state: DialogState,
                         rng: np.random.Generator, M: int) -> np.ndarray:
    """Monte Carlo answer marginal: average the predicted answer distribution
    over M draws of a particle and a query from that particle's policy.
    """
    if len(ensemble) == 0:
        raise InvalidInputError("Empty ensemble.")
    if M < 1:
        raise InvalidInputError("Need at least one sample.")
    total = np.zeros(N_ANSWERS)
    for _ in range(M):
        particle = ensemble[int(rng.integers(len(ensemble)))]
        total += predict_answer_dist(model, state, sample_query(particle, state, rng))
    return total / M


def exact_marginal_answer_dist(ensemble: ParticleEnsemble, model: AnswererModel,
                               state: DialogState) -> np.ndarray:
    """The answer marginal by enumerating particles and queries."""
    if len(ensemble) == 0:
        raise InvalidInputError("Empty ensemble.")
    table = np.stack([predict_answer_dist(model, state, q) for q in all_queries(model.schema)])
    mix = np.mean([action_probs(p, state) for p in ensemble], axis=0)
    return mix @ table


@dataclass(frozen=True, eq=False)
class AnswerRecord:
    """An observed answer. `goal_scores[a]` is the executor's probability of
    the true target had the answer been `a`; only the goal objective uses it.
    """
    state: DialogState
    query: Query
    answer: Answer
    goal_scores: Optional[np.ndarray] = None


def log_likelihood_grad(model: AnswererModel, state: DialogState, query: Query,
                        answer: Answer) -> np.ndarray:
    """Gradient of log p(answer | query, state; omega)."""
    x = _inputs(model, state, query)
    delta = -softmax(model.omega @ x)
    delta[int(answer)] += 1.0
    return np.outer(delta, x)


def goal_likelihood_grad(model: AnswererModel, state: DialogState, query: Query,
                         goal_scores: np.ndarray) -> np.ndarray:
    """Gradient of log sum_a g(a) p(a | query, state; omega)."""
    x = _inputs(model, state, query)
    p = softmax(model.omega @ x)
    w = np.asarray(goal_scores, dtype=np.float64) * p
    total = w.sum()
    if not total > 0:
        raise NumericError("Goal likelihood vanished.")
    return np.outer(w / total - p, x)


def log_likelihood(model: AnswererModel, batch: Sequence[AnswerRecord],
                   objective: AnswererObjective = AnswererObjective.ANSWER) -> float:
    """Summed objective over `batch`; the quantity `update_answerer` ascends."""
    total = 0.0
    for rec in batch:
        logp = log_softmax(model.omega @ _inputs(model, rec.state, rec.query))
        if objective is AnswererObjective.GOAL:
            total += float(np.log(np.asarray(rec.goal_scores) @ np.exp(logp)))
        else:
            total += float(logp[int(rec.answer)])
    return total


def batch_gradient(model: AnswererModel, batch: Sequence[AnswerRecord],
                   objective: AnswererObjective = AnswererObjective.ANSWER) -> np.ndarray:
    if not batch:
        raise InvalidInputError("Empty answer batch.")
    grad = np.zeros_like(model.omega)
    for rec in batch:
        if objective is AnswererObjective.GOAL:
            if rec.goal_scores is None:
                raise InvalidInputError("Goal objective needs goal scores on every record.")
            grad += goal_likelihood_grad(model, rec.state, rec.query, rec.goal_scores)
        else:
            grad += log_likelihood_grad(model, rec.state, rec.query, rec.answer)
    return grad


def update_answerer(model: AnswererModel, batch: Sequence[AnswerRecord], step: float,
                    objective: AnswererObjective = AnswererObjective.ANSWER) -> AnswererModel:
    """One ascent step on the summed objective. Returns a new model; the
    update is rejected with NumericError if it is not finite.
    """
    if not step > 0:
        raise InvalidInputError("Answerer step size must be positive.")
    grad = batch_gradient(model, batch, objective)
    new = model.omega + step * grad
    if not np.isfinite(new).all():
        raise NumericError("Non-finite answerer update.")
    return AnswererModel(new, model.schema)


def accuracy(model: AnswererModel, batch: Sequence[AnswerRecord]) -> float:
    """Fraction of records whose answer is the model's most likely one."""
    if not batch:
        return 0.0
    hits = sum(1 for rec in batch if modal_answer(model, rec.state, rec.query) == rec.answer)
    return hits / len(batch)

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

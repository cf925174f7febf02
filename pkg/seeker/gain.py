# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Pricing queries by an optimistic information gain.

For a query q the answerer model predicts answers a_1 .. a_M. Each sample
gives a difference of utilities

    d_m = u(score(a*)) - u(score(a_m))

where score(a) is the executor's goal probability after the hypothetical
answer a, and a* is the true answer (the realized oracle answer during
training, the answerer's modal answer when choosing a query). The gain bound
is mean(d) + beta**2 * std(d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from .core.constants import Answer, UtilityKind, N_ANSWERS, CONSISTENCY_EPS
from .core.exceptions import InvalidInputError, UtilityDomainError
from .core.features import token_id
from .core.types import Scene, DialogState, Query
from .answerer import AnswererModel, predict_answer_dist
from .executor import candidate_posterior, executor_score
from .policy import ParticleEnsemble, sample_query


def utility(kind: UtilityKind, score: float) -> float:
    """u_entropy(x) = -log(x), u_exp(x) = 1 / (1 + exp(x))."""
    kind = UtilityKind.from_name(kind)
    if kind is UtilityKind.ENTROPY:
        if not score > 0:
            raise UtilityDomainError(
                "Entropy utility needs a positive score, got {}.".format(score))
        return -math.log(score)
    return float(expit(-score))


@dataclass(frozen=True)
class GainEstimate:
    mu_hat: float
    sigma_hat: float
    g_hat: float
    beta: float
    n_samples: int

    @classmethod
    def from_differences(cls, differences: Sequence[float], beta: float) -> "GainEstimate":
        d = np.asarray(differences, dtype=np.float64)
        if d.shape[0] < 2:
            raise InvalidInputError("Need at least two samples for a standard deviation.")
        if not beta > 0:
            raise InvalidInputError("beta must be positive.")
        mu = float(d.mean())
        sigma = float(d.std(ddof=1))
        return cls(mu_hat=mu, sigma_hat=sigma, g_hat=mu + beta ** 2 * sigma,
                   beta=beta, n_samples=int(d.shape[0]))


def answer_utilities(scene: Scene, state: DialogState, query: Query, utility_kind: UtilityKind,
                     target: Optional[int] = None, eps: float = CONSISTENCY_EPS) -> np.ndarray:
    """Utility of the executor's score after each possible answer to `query`.
    The score is read at one position for all answers.
    """
    history = state.history
    if target is None:
        target = candidate_posterior(scene, history, eps).top()
    return np.array([utility(utility_kind, executor_score(scene, history, (query, a), target, eps))
                     for a in Answer])


def gain_statistics(scene: Scene, state: DialogState, query: Query, answerer: AnswererModel,
                    M: int, utility_kind: UtilityKind, true_answer: Answer, *,
                    beta: float = 1.0, rng: np.random.Generator,
                    target: Optional[int] = None,
                    eps: float = CONSISTENCY_EPS) -> GainEstimate:
    """Empirical gain of `query` over M answers sampled from the answerer.

    With `target` None the executor's current top candidate is the
    evaluation point, otherwise the object at position `target`.
    """
    if M < 2:
        raise InvalidInputError("gain_statistics needs M >= 2, got {}.".format(M))
    probs = predict_answer_dist(answerer, state, query)
    samples = rng.choice(N_ANSWERS, size=M, p=probs)
    u = answer_utilities(scene, state, query, utility_kind, target, eps)
    return GainEstimate.from_differences(u[int(true_answer)] - u[samples], beta)


def shaped_reward(r: float, g_hat: float, eta: float) -> float:
    if eta < 0:
        raise InvalidInputError("eta must not be negative.")
    return r + eta * g_hat


def eta_schedule(epoch: int, epoch_max: int, eta0: float) -> float:
    """Linear decay from eta0 at epoch 0 to zero at epoch_max."""
    if epoch_max <= 0:
        return eta0 if epoch <= 0 else 0.0
    if epoch >= epoch_max:
        return 0.0
    return eta0 * (epoch_max - max(epoch, 0)) / epoch_max


def score_candidates(ensemble: ParticleEnsemble, answerer: AnswererModel, scene: Scene,
                     state: DialogState, rng: np.random.Generator,
                     candidates_per_particle: int = 1, M: int = 16,
                     utility_kind: UtilityKind = UtilityKind.ENTROPY, beta: float = 1.0,
                     eps: float = CONSISTENCY_EPS) -> List[Tuple[Query, GainEstimate]]:
    """Sample candidate queries from each particle and price each distinct one.

    Candidates are drawn particle by particle, then priced in order of first
    appearance, with the answerer's modal answer standing in for a*.
    """
    if len(ensemble) == 0:
        raise InvalidInputError("Empty ensemble.")
    if candidates_per_particle < 1:
        raise InvalidInputError("Need at least one candidate per particle.")
    candidates = []
    for particle in ensemble:
        for _ in range(candidates_per_particle):
            q = sample_query(particle, state, rng)
            if q not in candidates:
                candidates.append(q)
    scored = []
    for q in candidates:
        modal = Answer(int(np.argmax(predict_answer_dist(answerer, state, q))))
        est = gain_statistics(scene, state, q, answerer, M, utility_kind, modal,
                              beta=beta, rng=rng, eps=eps)
        scored.append((q, est))
    return scored


def best_candidate(scored: Sequence[Tuple[Query, GainEstimate]], schema) -> Query:
    """Candidate with the largest gain bound; ties to the lowest token id."""
    return min(scored, key=lambda qe: (-qe[1].g_hat, token_id(qe[0], schema)))[0]


def select_query(ensemble: ParticleEnsemble, answerer: AnswererModel, scene: Scene,
                 state: DialogState, rng: np.random.Generator,
                 candidates_per_particle: int = 1, M: int = 16,
                 utility_kind: UtilityKind = UtilityKind.ENTROPY, beta: float = 1.0,
                 eps: float = CONSISTENCY_EPS) -> Query:
    scored = score_candidates(ensemble, answerer, scene, state, rng, candidates_per_particle,
                              M, utility_kind, beta, eps)
    return best_candidate(scored, scene.schema)

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Softmax-linear questioning policy.

A policy particle holds one logit row per query token; the probability of
asking token q in state s is softmax(theta @ phi(s))[q]. An ensemble of
particles represents the distribution over policies.
"""

from __future__ import annotations

import os
from typing import Iterator, List, Optional, Sequence

import numpy as np
from scipy.special import softmax, log_softmax

from .core.exceptions import InvalidInputError, CheckpointError
from .core.features import token_id, query_of_token
from .core.types import AttributeSchema, DialogState, Query


class PolicyParticle:
    """One parameter setting of the questioning policy.

    Attributes:
        theta: float64 array of shape (vocab_size, feature_dim).
    """

    def __init__(self, theta: np.ndarray, schema: AttributeSchema):
        theta = np.array(theta, dtype=np.float64)
        if theta.shape != (schema.vocab_size, schema.feature_dim):
            raise InvalidInputError("theta has shape {}, need {}.".format(
                theta.shape, (schema.vocab_size, schema.feature_dim)))
        self.theta = theta
        self.schema = schema

    def __repr__(self):
        return "{}(shape={})".format(self.__class__.__name__, self.theta.shape)

    @classmethod
    def zeros(cls, schema: AttributeSchema) -> "PolicyParticle":
        return cls(np.zeros((schema.vocab_size, schema.feature_dim)), schema)

    @property
    def shape(self):
        return self.theta.shape

    def copy(self) -> "PolicyParticle":
        return self.__class__(self.theta.copy(), self.schema)


def _check_state(particle: PolicyParticle, state: DialogState):
    if state.feature_vector.shape != (particle.theta.shape[1],):
        raise InvalidInputError("State dimension {} does not match policy dimension {}.".format(
            state.feature_vector.shape[0], particle.theta.shape[1]))


def logits(particle: PolicyParticle, state: DialogState) -> np.ndarray:
    _check_state(particle, state)
    return particle.theta @ state.feature_vector


def action_probs(particle: PolicyParticle, state: DialogState) -> np.ndarray:
    """Probability of each query token in `state`."""
    return softmax(logits(particle, state))


def log_prob(particle: PolicyParticle, state: DialogState, query: Query) -> float:
    return float(log_softmax(logits(particle, state))[token_id(query, particle.schema)])


def sample_query(particle: PolicyParticle, state: DialogState,
                 rng: np.random.Generator) -> Query:
    probs = action_probs(particle, state)
    return query_of_token(rng.choice(probs.shape[0], p=probs), particle.schema)


def greedy_query(particle: PolicyParticle, state: DialogState) -> Query:
    """Most probable query; ties go to the lowest token id."""
    return query_of_token(int(np.argmax(logits(particle, state))), particle.schema)


def log_prob_grad(particle: PolicyParticle, state: DialogState, query: Query) -> np.ndarray:
    """Gradient of log pi(query | state; theta) with respect to theta.

    Equal to (one_hot(query) - probs) outer phi(state).
    """
    probs = action_probs(particle, state)
    delta = -probs
    delta[token_id(query, particle.schema)] += 1.0
    return np.outer(delta, state.feature_vector)


class ParticleEnsemble:
    """A set of policy particles of identical shape."""

    def __init__(self, particles: Sequence[PolicyParticle]):
        particles = list(particles)
        if not particles:
            raise InvalidInputError("An ensemble needs at least one particle.")
        shape = particles[0].shape
        if any(p.shape != shape for p in particles):
            raise InvalidInputError("All particles of an ensemble must have the same shape.")
        self.particles = particles
        self.schema = particles[0].schema

    def __len__(self):
        return len(self.particles)

    def __iter__(self) -> Iterator[PolicyParticle]:
        return iter(self.particles)

    def __getitem__(self, i) -> PolicyParticle:
        return self.particles[i]

    def __repr__(self):
        return "{}(n={}, shape={})".format(self.__class__.__name__, len(self), self.shape)

    @property
    def shape(self):
        return self.particles[0].shape

    @classmethod
    def initialize(cls, schema: AttributeSchema, n: int, rng: np.random.Generator,
                   scale: float = 0.1) -> "ParticleEnsemble":
        """Draw `n` particles with i.i.d. N(0, scale^2) entries."""
        shape = (schema.vocab_size, schema.feature_dim)
        return cls([PolicyParticle(rng.normal(0.0, scale, size=shape), schema)
                    for _ in range(n)])

    @classmethod
    def from_array(cls, arr: np.ndarray, schema: AttributeSchema) -> "ParticleEnsemble":
        return cls([PolicyParticle(a, schema) for a in np.asarray(arr, dtype=np.float64)])

    def to_array(self) -> np.ndarray:
        """Stacked parameters, shape (n, vocab_size, feature_dim)."""
        return np.stack([p.theta for p in self.particles])

    def flat(self) -> np.ndarray:
        """Parameters flattened to one row per particle."""
        return self.to_array().reshape(len(self), -1)

    def copy(self) -> "ParticleEnsemble":
        return self.__class__([p.copy() for p in self.particles])

    def is_finite(self) -> bool:
        return all(np.isfinite(p.theta).all() for p in self.particles)

    def save(self, path: str):
        """Write the stacked parameters as a .npy array file."""
        try:
            np.save(path, self.to_array(), allow_pickle=False)
        except OSError as err:
            raise CheckpointError("Could not write particles to {!r}.".format(path)) from err

    @classmethod
    def load(cls, path: str, schema: AttributeSchema) -> "ParticleEnsemble":
        if not os.path.exists(path):
            raise CheckpointError("No particle file {!r}.".format(path))
        arr = np.load(path, allow_pickle=False)
        if arr.ndim != 3:
            raise CheckpointError("Particle file {!r} has shape {}.".format(path, arr.shape))
        try:
            return cls.from_array(arr, schema)
        except InvalidInputError as err:
            raise CheckpointError("Particle file {!r} does not match the schema.".format(
                path)) from err


def single(particle: PolicyParticle) -> ParticleEnsemble:
    """Wrap one particle as an ensemble (views the same parameters)."""
    return ParticleEnsemble([particle])


def mixture_probs(ensemble: ParticleEnsemble, state: DialogState,
                  weights: Optional[List[float]] = None) -> np.ndarray:
    """Query distribution of the ensemble, averaging over particles."""
    probs = np.stack([action_probs(p, state) for p in ensemble])
    if weights is None:
        return probs.mean(axis=0)
    return np.average(probs, axis=0, weights=weights)

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

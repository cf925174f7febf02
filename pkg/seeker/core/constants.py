# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Universal constants and enumerations. These may be used in code, and are
also translated to integers or names in persistent storage.
"""

from enum import IntEnum as Enum


class Answer(Enum):
    """A reply to a query. The values are also the row index of the answerer
    model's logits.
    """
    YES = 0
    NO = 1
    NA = 2

    def __str__(self):
        return self.name.capitalize() if self is not Answer.NA else "NA"

    @classmethod
    def from_name(cls, name):
        return cls[str(name).upper()]


N_ANSWERS = len(Answer)


class UtilityKind(Enum):
    """Utility applied to the executor's score when pricing a query."""
    ENTROPY = 0  # -log(score)
    EXP = 1  # 1 / (1 + exp(score))

    @classmethod
    def from_name(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError("Unknown utility kind: {!r}".format(name)) from None


class Selection(Enum):
    """How a query is chosen at each round."""
    SAMPLE = 0  # draw from the particle's own policy
    GAIN = 1  # best optimistic gain among sampled candidates
    GREEDY = 2  # most probable token of the policy

    @classmethod
    def from_name(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError("Unknown query selection: {!r}".format(name)) from None


class AnswererObjective(Enum):
    """What the answerer model is trained to maximize."""
    ANSWER = 0  # likelihood of the observed oracle answer
    GOAL = 1  # expected executor probability of the true target

    @classmethod
    def from_name(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError("Unknown answerer objective: {!r}".format(name)) from None


# Default consistency smoothing of the goal executor.
CONSISTENCY_EPS = 0.01

# Bandwidth sentinel for the median heuristic.
MEDIAN = "median"

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Unit tests for seeker.executor.
"""

import numpy as np
import pytest

from seeker import executor
from seeker.core.constants import Answer
from seeker.core.exceptions import InvalidInputError
from seeker.core.features import all_queries
from seeker.core.types import AttributeSchema, GameConfig, Query
from seeker.env import generate_scene

from .conftest import make_scene

EPS = 0.01


def brute_force(scene, history, eps=EPS):
    """Posterior by multiplying one factor per history item, object by object."""
    weights = []
    for obj in scene.objects:
        w = 1.0
        for query, answer in history:
            if answer is Answer.NA:
                continue
            has = obj.attribute_values[query.attribute] == query.value
            consistent = has if answer is Answer.YES else not has
            w *= (1 - eps) if consistent else eps
        weights.append(w)
    total = sum(weights)
    return [w / total for w in weights]


def brute_force_guess(scene, probs):
    top = max(probs)
    tied = [obj.id for obj, p in zip(scene.objects, probs) if p >= top * (1 - 1e-12)]
    return min(tied)


class TestCandidatePosterior:

    def test_empty_history(self, scene4):
        post = executor.candidate_posterior(scene4, [])
        np.testing.assert_array_equal(post.probs, np.full(4, 0.25))
        assert len(post) == 4

    def test_one_yes(self, scene4):
        # red: objects 0 and 1
        post = executor.candidate_posterior(scene4, [(Query(0, 0), Answer.YES)])
        z = 2 * (1 - EPS) + 2 * EPS
        np.testing.assert_allclose(post.probs, [(1 - EPS) / z, (1 - EPS) / z, EPS / z, EPS / z],
                                   rtol=1e-14)

    def test_identifying_history(self, scene4):
        history = [(Query(0, 0), Answer.YES), (Query(2, 1), Answer.YES)]
        post = executor.candidate_posterior(scene4, history)
        weights = np.array([(1 - EPS) ** 2, (1 - EPS) * EPS, EPS ** 2, EPS * (1 - EPS)])
        assert post.probs[0] >= (1 - EPS) ** 2 / weights.sum() - 1e-15
        assert post.probs[0] > post.probs[1:].max()
        assert post.top() == 0

    def test_na_is_uninformative(self, scene4):
        history = [(Query(1, 0), Answer.YES)]
        a = executor.candidate_posterior(scene4, history)
        b = executor.candidate_posterior(scene4, history + [(Query(0, 2), Answer.NA)])
        np.testing.assert_array_equal(a.probs, b.probs)

    def test_bad_eps(self, scene4):
        with pytest.raises(InvalidInputError):
            executor.candidate_posterior(scene4, [], eps=0.0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(99)
        schemas = [AttributeSchema.from_sizes(3, 3, 2), AttributeSchema.from_sizes(2, 2),
                   AttributeSchema.from_sizes(4, 2, 3)]
        for _ in range(1000):
            schema = schemas[rng.integers(len(schemas))]
            n = int(rng.integers(2, min(8, schema.n_signatures) + 1))
            scene = generate_scene(GameConfig(n_objects=n, schema=schema), rng)
            queries = all_queries(schema)
            history = [(queries[rng.integers(len(queries))], Answer(int(rng.integers(3))))
                       for _ in range(int(rng.integers(0, 7)))]
            post = executor.candidate_posterior(scene, history, EPS)
            want = brute_force(scene, history)
            np.testing.assert_allclose(post.probs, want, rtol=1e-12, atol=0)
            assert abs(post.probs.sum() - 1.0) <= 1e-12
            assert executor.guess(scene, history, EPS) == brute_force_guess(scene, want)

    def test_permutation(self, scene4, rng):
        history = [(Query(0, 0), Answer.YES), (Query(1, 1), Answer.NO)]
        perm = [2, 0, 3, 1]
        rows = [scene4.objects[i].attribute_values for i in perm]
        ids = [scene4.objects[i].id for i in perm]
        shuffled = make_scene(scene4.schema, rows, target_index=1, ids=ids)
        a = executor.candidate_posterior(scene4, history)
        b = executor.candidate_posterior(shuffled, history)
        np.testing.assert_allclose(b.probs, a.probs[perm], rtol=1e-14)
        assert a.top_id() == b.top_id()

    def test_monotone_for_target_only_answer(self, scene4):
        history = [(Query(0, 0), Answer.YES)]
        before = executor.candidate_posterior(scene4, history).probs[0]
        # only the target is red and large
        after = executor.candidate_posterior(scene4, history + [(Query(2, 1), Answer.YES)])
        assert after.probs[0] >= before


class TestGuess:

    def test_uniform_ties_lowest_id(self, schema):
        scene = make_scene(schema, [(0, 0, 0), (1, 1, 1), (2, 2, 0)], ids=[5, 2, 7])
        assert executor.guess(scene, []) == 2

    def test_point_mass(self, scene4):
        history = [(Query(0, 2), Answer.YES)]  # only object 3 is blue
        assert executor.guess(scene4, history) == 3

    def test_duplicates_keep_argmax(self, scene4):
        history = [(Query(0, 0), Answer.YES), (Query(1, 0), Answer.YES)]
        once = executor.candidate_posterior(scene4, history)
        twice = executor.candidate_posterior(scene4, history + [history[0]])
        assert once.top() == twice.top()

    def test_long_contradictory_history(self, scene4):
        # 170 disagreements per object, far past where eps ** n underflows.
        history = [(Query(0, 0), Answer.YES), (Query(0, 0), Answer.NO)] * 170
        post = executor.candidate_posterior(scene4, history)
        assert np.isfinite(post.probs).all()
        np.testing.assert_allclose(post.probs, np.full(4, 0.25), rtol=1e-12)
        assert executor.guess(scene4, history) == 0
        history.append((Query(0, 2), Answer.YES))
        post = executor.candidate_posterior(scene4, history)
        assert post.probs.sum() == pytest.approx(1.0)
        assert executor.guess(scene4, history) == 3


class TestExecutorScore:

    def test_na_leaves_score(self, scene4):
        history = [(Query(0, 0), Answer.YES)]
        base = executor.candidate_posterior(scene4, history)
        score = executor.executor_score(scene4, history, (Query(1, 1), Answer.NA))
        assert score == base.probs[base.top()]

    def test_at_target(self, scene4):
        history = [(Query(0, 0), Answer.YES)]
        score = executor.executor_score(scene4, history, (Query(2, 1), Answer.YES), target=0)
        post = executor.candidate_posterior(scene4, history + [(Query(2, 1), Answer.YES)])
        assert score == post.probs[0] == post.probs.max()

    def test_top_candidate_is_read_before_the_answer(self, scene4):
        # uniform prior: top candidate is object 0 even though "blue" rules it out
        score = executor.executor_score(scene4, [], (Query(0, 2), Answer.YES))
        post = executor.candidate_posterior(scene4, [(Query(0, 2), Answer.YES)])
        assert score == post.probs[0]

    def test_bad_target(self, scene4):
        with pytest.raises(InvalidInputError):
            executor.executor_score(scene4, [], (Query(0, 0), Answer.YES), target=4)
        with pytest.raises(InvalidInputError):
            executor.executor_score(scene4, [], ("color", Answer.YES))

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

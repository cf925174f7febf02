# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Unit tests for seeker.svgd.
"""

import math

import numpy as np
import pytest
from scipy.spatial.distance import pdist

from seeker import svgd
from seeker.core.exceptions import InvalidInputError, NumericError
from seeker.core.types import AttributeSchema
from seeker.policy import ParticleEnsemble, PolicyParticle


@pytest.fixture
def tiny():
    return AttributeSchema.from_sizes(2, 2)  # theta is 4 x 9


def ensemble_of(arrays, schema):
    return ParticleEnsemble([PolicyParticle(a, schema) for a in arrays])


class TestKernel:

    def test_self(self, rng):
        a = rng.normal(size=(3, 4))
        assert svgd.rbf_kernel(a, a, 2.0) == 1.0

    def test_distance_equals_bandwidth(self):
        a = np.zeros((2, 2))
        b = np.array([[1.0, 1.0], [0.0, 0.0]])
        assert svgd.rbf_kernel(a, b, 2.0) == pytest.approx(math.exp(-1.0), abs=1e-15)

    def test_symmetric(self, rng):
        for _ in range(10):
            a, b = rng.normal(size=(2, 5, 3))
            assert svgd.rbf_kernel(a, b, 1.7) == svgd.rbf_kernel(b, a, 1.7)

    def test_particles(self, tiny, rng):
        a = PolicyParticle(rng.normal(size=(4, 9)), tiny)
        assert svgd.rbf_kernel(a, a.copy(), 3.0) == 1.0

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            svgd.rbf_kernel(np.zeros((2, 2)), np.zeros((2, 3)), 1.0)
        with pytest.raises(InvalidInputError):
            svgd.rbf_kernel(np.zeros(2), np.zeros(2), 0.0)

    def test_grad_at_self(self, rng):
        a = rng.normal(size=(3, 3))
        np.testing.assert_array_equal(svgd.kernel_grad_wrt_first(a, a, 1.0), np.zeros((3, 3)))

    def test_grad_points_toward_b(self, rng):
        for _ in range(10):
            a, b = rng.normal(size=(2, 4, 2))
            g = svgd.kernel_grad_wrt_first(a, b, 5.0)
            assert g.shape == a.shape
            assert float((g * (b - a)).sum()) > 0

    def test_grad_finite_differences(self, rng):
        h = 1e-6
        for _ in range(20):
            a, b = rng.normal(size=(2, 3, 2))
            bw = float(rng.uniform(1.0, 10.0))
            numeric = np.zeros_like(a)
            for idx in np.ndindex(a.shape):
                plus, minus = a.copy(), a.copy()
                plus[idx] += h
                minus[idx] -= h
                numeric[idx] = (svgd.rbf_kernel(plus, b, bw) -
                                svgd.rbf_kernel(minus, b, bw)) / (2 * h)
            np.testing.assert_allclose(svgd.kernel_grad_wrt_first(a, b, bw), numeric, atol=1e-6)


class TestBandwidth:

    def test_two_particles(self, tiny):
        a = np.zeros((4, 9))
        b = np.zeros((4, 9))
        b[0, 0] = 2.0
        h = svgd.median_bandwidth(ensemble_of([a, b], tiny))
        assert h == pytest.approx(4 / math.log(3))
        assert h == pytest.approx(3.641, abs=1e-3)

    def test_identical(self, tiny):
        a = np.ones((4, 9))
        assert svgd.median_bandwidth(ensemble_of([a, a, a], tiny)) == 1.0

    def test_single(self, tiny):
        assert svgd.median_bandwidth(ensemble_of([np.ones((4, 9))], tiny)) == 1.0

    def test_kernel_row_sums(self, rng):
        for n in (2, 5, 10, 30):
            X = rng.normal(0, rng.uniform(0.1, 10), size=(n, 12))
            K = svgd.kernel_matrix(X, svgd.median_bandwidth_of(X))
            sums = K.sum(axis=1)
            assert (sums >= 0.5).all()
            assert (sums <= 2 * n).all()

    def test_kernel_config(self):
        assert svgd.KernelConfig().is_median
        assert svgd.KernelConfig(2.5).resolve(np.zeros((3, 2))) == 2.5
        with pytest.raises(InvalidInputError):
            svgd.KernelConfig(-1.0)
        with pytest.raises(InvalidInputError):
            svgd.KernelConfig("mode")


def naive_directions(X, G, h):
    """Two-loop evaluation of the SVGD direction."""
    n = len(X)
    out = []
    for i in range(n):
        psi = np.zeros_like(X[i])
        for j in range(n):
            psi += svgd.rbf_kernel(X[j], X[i], h) * G[j]
            psi += svgd.kernel_grad_wrt_first(X[j], X[i], h)
        out.append(psi / n)
    return out


class TestDirections:

    def test_single_particle_is_gradient(self, tiny, rng):
        ens = ensemble_of([rng.normal(size=(4, 9))], tiny)
        g = rng.normal(size=(4, 9))
        (d,) = svgd.svgd_directions(ens, [g])
        np.testing.assert_array_equal(d, g)

    def test_pure_repulsion(self, tiny, rng):
        a, b = rng.normal(size=(2, 4, 9))
        ens = ensemble_of([a, b], tiny)
        cfg = svgd.KernelConfig(20.0)
        d0, d1 = svgd.svgd_directions(ens, [np.zeros((4, 9))] * 2, cfg)
        np.testing.assert_allclose(d0, 0.5 * svgd.kernel_grad_wrt_first(b, a, 20.0),
                                   rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(d1, 0.5 * svgd.kernel_grad_wrt_first(a, b, 20.0),
                                   rtol=1e-12, atol=1e-13)
        assert float((d0 * (a - b)).sum()) > 0

    @pytest.mark.parametrize("bandwidth", [svgd.MEDIAN, 3.0])
    def test_matches_naive(self, tiny, rng, bandwidth):
        for _ in range(5):
            X = rng.normal(size=(3, 4, 9))
            G = rng.normal(size=(3, 4, 9))
            ens = ensemble_of(X, tiny)
            cfg = svgd.KernelConfig(bandwidth)
            h = cfg.resolve(ens.flat())
            got = svgd.svgd_directions(ens, list(G), cfg)
            for g, want in zip(got, naive_directions(X, G, h)):
                np.testing.assert_allclose(g, want, rtol=1e-10, atol=1e-12)

    def test_permutation_equivariant(self, tiny, rng):
        X = rng.normal(size=(5, 4, 9))
        G = rng.normal(size=(5, 4, 9))
        perm = rng.permutation(5)
        d = svgd.svgd_directions(ensemble_of(X, tiny), list(G))
        dp = svgd.svgd_directions(ensemble_of(X[perm], tiny), list(G[perm]))
        for k, i in enumerate(perm):
            np.testing.assert_allclose(dp[k], d[i], rtol=1e-12, atol=1e-12)

    def test_count_mismatch(self, tiny, rng):
        ens = ensemble_of(rng.normal(size=(2, 4, 9)), tiny)
        with pytest.raises(InvalidInputError):
            svgd.svgd_directions(ens, [np.zeros((4, 9))])
        with pytest.raises(InvalidInputError):
            svgd.svgd_directions(ens, [np.zeros((4, 8))] * 2)


class TestStep:

    def test_zero_step(self, tiny, rng):
        X = rng.normal(size=(3, 4, 9))
        ens = ensemble_of(X, tiny)
        svgd.svgd_step(ens, list(rng.normal(size=(3, 4, 9))), 0.0)
        np.testing.assert_array_equal(ens.to_array(), X)

    def test_zero_directions(self, tiny, rng):
        X = rng.normal(size=(3, 4, 9))
        ens = ensemble_of(X, tiny)
        svgd.svgd_step(ens, [np.zeros((4, 9))] * 3, 0.1)
        np.testing.assert_array_equal(ens.to_array(), X)

    def test_non_finite_rejected(self, tiny, rng):
        X = rng.normal(size=(2, 4, 9))
        ens = ensemble_of(X, tiny)
        bad = np.zeros((4, 9))
        bad[1, 1] = np.nan
        with pytest.raises(NumericError):
            svgd.svgd_step(ens, [np.ones((4, 9)), bad], 0.1)
        np.testing.assert_array_equal(ens.to_array(), X)

    def test_single_particle_is_gradient_ascent(self, tiny, rng):
        mode = rng.normal(size=(4, 9))
        start = rng.normal(size=(4, 9))
        ens = ensemble_of([start], tiny)
        theta = start.copy()
        cfg = svgd.KernelConfig(1.0)
        for _ in range(50):
            grads = [mode - ens[0].theta]
            svgd.svgd_step(ens, svgd.svgd_directions(ens, grads, cfg), 0.1)
            theta += 0.1 * (mode - theta)
            np.testing.assert_array_equal(ens[0].theta, theta)

    def test_repulsion_spreads(self, tiny, rng):
        ens = ensemble_of(rng.normal(0, 0.5, size=(2, 4, 9)), tiny)
        for _ in range(5):
            before = pdist(ens.flat()).min()
            zeros = [np.zeros((4, 9))] * 2
            svgd.svgd_step(ens, svgd.svgd_directions(ens, zeros), 0.01)
            assert pdist(ens.flat()).min() >= before

    def test_adaptive_first_step(self, tiny, rng):
        X = rng.normal(size=(2, 4, 9))
        ens = ensemble_of(X, tiny)
        D = rng.normal(size=(2, 4, 9))
        stepper = svgd.AdaptiveStepper(0.1, decay=0.9, fudge=1e-6)
        stepper(ens, list(D))
        np.testing.assert_allclose(ens.to_array(), X + 0.1 * D / (1e-6 + np.abs(D)))
        state = stepper.state()
        other = svgd.AdaptiveStepper(0.1)
        other.set_state(state)
        np.testing.assert_array_equal(other.history, stepper.history)


class TestRunSVGD:

    def test_gaussian_mean(self, rng):
        X = rng.normal(3.0, 1.0, size=(40, 1))
        out = svgd.run_svgd(X, lambda Y: -Y, 500, 0.05)
        assert abs(out.mean()) < 0.1
        assert out.shape == (40, 1)

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

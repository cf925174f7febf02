# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Trajectory collection, policy gradients and the training loop.

Every epoch each particle plays its own episodes on a shared batch of
scenes, the answerer model is fitted to the answers seen, each particle gets
a posterior gradient (REINFORCE with a per-round baseline, scaled by 1/alpha,
plus the Gaussian prior score) and the ensemble takes one SVGD step.

Random streams are derived from the run seed with `numpy.random.SeedSequence`:
one stream each for initialization, training scenes, the scene pool and
evaluation, and one per particle for its rollouts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import logging
from . import signals
from .answerer import AnswererModel, AnswerRecord, update_answerer, accuracy
from .core.constants import Answer, Selection, AnswererObjective
from .core.exceptions import (InvalidInputError, NumericError, DivergenceError,
                              CheckpointError, ConfigValueError)
from .core.types import RunConfig, GameConfig, Scene, DialogState, Query, Step, Trajectory
from .env import Episode, ScenePool, generate_scene, episode_to_record, step as env_step
from .executor import executor_score
from .gain import gain_statistics, shaped_reward, eta_schedule, select_query
from .harness.checkpoint import save_checkpoint, load_checkpoint, latest_checkpoint
from .harness.metrics import MetricsRow, avg_pairwise_distance
from .policy import (PolicyParticle, ParticleEnsemble, sample_query, greedy_query,
                     log_prob_grad, single)
from .svgd import KernelConfig, AdaptiveStepper, svgd_directions, svgd_step

NEW_IMAGE = "new-image"
NEW_OBJECT = "new-object"
SPLITS = (NEW_IMAGE, NEW_OBJECT)


# Random streams

@dataclass
class Streams:
    init: np.random.Generator
    scenes: np.random.Generator
    pool: np.random.Generator
    evaluation: np.random.Generator
    rollouts: List[np.random.Generator]

    def _all(self):
        return [self.init, self.scenes, self.pool, self.evaluation] + list(self.rollouts)

    def state(self) -> list:
        return [g.bit_generator.state for g in self._all()]

    def set_state(self, states: Sequence[dict]):
        gens = self._all()
        if len(states) != len(gens):
            raise CheckpointError("Checkpoint has {} generator states, need {}.".format(
                len(states), len(gens)))
        for g, st in zip(gens, states):
            g.bit_generator.state = st


def make_streams(seed: int, n_particles: int) -> Streams:
    root = np.random.SeedSequence(seed)
    init, scenes, pool, evaluation, rollouts = root.spawn(5)
    return Streams(init=np.random.default_rng(init),
                   scenes=np.random.default_rng(scenes),
                   pool=np.random.default_rng(pool),
                   evaluation=np.random.default_rng(evaluation),
                   rollouts=[np.random.default_rng(s) for s in rollouts.spawn(n_particles)])


class SceneSource:
    """Fresh scenes, or scenes from a fixed pool when the game has one."""

    def __init__(self, game: GameConfig, pool_rng: np.random.Generator):
        self.game = game
        self.pool = ScenePool(game, pool_rng, game.scene_pool) if game.scene_pool > 0 else None

    def draw(self, rng: np.random.Generator) -> Scene:
        if self.pool is not None:
            return self.pool.draw(rng)
        return generate_scene(self.game, rng)

    def draw_split(self, rng: np.random.Generator, split: str) -> Scene:
        if split == NEW_IMAGE:
            return generate_scene(self.game, rng)
        if split == NEW_OBJECT:
            if self.pool is None:
                raise ConfigValueError("The new-object split needs game.scene_pool > 0.")
            return self.pool.draw_new_object(rng)
        raise InvalidInputError("Unknown split {!r}, use one of {}.".format(split, SPLITS))


# Baseline and prior

class Baseline:
    """Per-round exponential moving average of returns."""

    def __init__(self, T_max: int, decay: float = 0.9):
        if T_max < 1:
            raise InvalidInputError("Baseline needs at least one round.")
        if not (0.0 <= decay < 1.0):
            raise InvalidInputError("Baseline decay must be in [0, 1).")
        self.values = np.zeros(T_max)
        self.decay = decay

    def __repr__(self):
        return "Baseline({})".format(self.values.tolist())

    def update(self, trajectories: Sequence[Trajectory], gamma: float, shaped: bool = True):
        sums = np.zeros_like(self.values)
        counts = np.zeros_like(self.values)
        for traj in trajectories:
            G = returns(traj, gamma, shaped)
            n = min(len(G), len(sums))
            sums[:n] += G[:n]
            counts[:n] += 1
        seen = counts > 0
        means = np.divide(sums, counts, out=np.zeros_like(sums), where=seen)
        self.values[seen] = self.decay * self.values[seen] + (1.0 - self.decay) * means[seen]


@dataclass(frozen=True)
class PriorSpec:
    """Isotropic Gaussian prior N(0, sigma^2 I) over policy parameters."""
    sigma: float = 10.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidInputError("Prior scale must be positive.")

    @property
    def flat(self) -> bool:
        return math.isinf(self.sigma)

    def score(self, theta: np.ndarray) -> np.ndarray:
        if self.flat:
            return np.zeros_like(theta)
        return -theta / self.sigma ** 2


# Episodes

Chooser = Callable[[DialogState], Query]


def play(scene: Scene, config: RunConfig, answerer: AnswererModel, choose: Chooser,
         rng: np.random.Generator, eta: float = 0.0,
         intrinsic: bool = True) -> Tuple[Episode, Trajectory]:
    """Play one game, asking `choose(state)` every round.

    With `intrinsic` set, each asked query is priced with the realized answer
    as a* at the true target, and the reward is shaped by `eta` times that gain.
    """
    game = config.game
    episode = Episode(scene, game)
    traj = Trajectory()
    done = False
    while not done:
        state = episode.state()
        query = choose(state)
        answer, reward, done = env_step(episode, query, rng)
        gain = 0.0
        if intrinsic:
            est = gain_statistics(scene, state, query, answerer, config.answer_samples,
                                  config.utility_kind, answer, beta=config.beta, rng=rng,
                                  target=scene.target_index, eps=game.consistency_eps)
            gain = est.g_hat
        traj.steps.append(Step(state=state, query=query, answer=answer,
                               extrinsic_reward=reward, intrinsic_gain=gain,
                               shaped_reward=shaped_reward(reward, gain, eta)))
    traj.guess = episode.guess
    traj.success = episode.success
    return episode, traj


def particle_chooser(particle: PolicyParticle, config: RunConfig, answerer: AnswererModel,
                     scene: Scene, rng: np.random.Generator,
                     selection: Selection = Selection.SAMPLE) -> Chooser:
    if selection is Selection.SAMPLE:
        return lambda state: sample_query(particle, state, rng)
    if selection is Selection.GREEDY:
        return lambda state: greedy_query(particle, state)
    return ensemble_chooser(single(particle), config, answerer, scene, rng)


def ensemble_chooser(ensemble: ParticleEnsemble, config: RunConfig, answerer: AnswererModel,
                     scene: Scene, rng: np.random.Generator) -> Chooser:
    return lambda state: select_query(ensemble, answerer, scene, state, rng,
                                      config.candidates_per_particle, config.answer_samples,
                                      config.utility_kind, config.beta,
                                      config.game.consistency_eps)


def rollout(particle: PolicyParticle, config: RunConfig, answerer: AnswererModel, scene: Scene,
            rng: np.random.Generator, eta: float = 0.0,
            selection: Optional[Selection] = None) -> Trajectory:
    """One on-policy episode of `particle`. Always runs T_max rounds."""
    selection = config.rollout_selection if selection is None else selection
    choose = particle_chooser(particle, config, answerer, scene, rng, selection)
    return play(scene, config, answerer, choose, rng, eta, config.intrinsic)[1]


# Gradients

def returns(trajectory: Trajectory, gamma: float, shaped: bool = True) -> np.ndarray:
    """Discounted return from every round, G_t = r_t + gamma * G_{t+1}."""
    if not (0.0 <= gamma <= 1.0):
        raise InvalidInputError("gamma must be in [0, 1].")
    rewards = trajectory.shaped_rewards if shaped else trajectory.extrinsic_rewards
    G = np.zeros_like(rewards)
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        G[t] = acc
    return G


def reinforce_grad(particle: PolicyParticle, trajectories: Sequence[Trajectory],
                   baseline=None, gamma: float = 0.99, shaped: bool = True) -> np.ndarray:
    """Mean over trajectories of sum_t grad log pi(q_t | s_t) (G_t - b_t).

    `baseline` is a `Baseline`, an array of per-round values, or None.
    """
    if not trajectories:
        raise InvalidInputError("Need at least one trajectory.")
    if isinstance(baseline, Baseline):
        baseline = baseline.values
    grad = np.zeros_like(particle.theta)
    for traj in trajectories:
        G = returns(traj, gamma, shaped)
        for t, st in enumerate(traj.steps):
            b = 0.0 if baseline is None or t >= len(baseline) else baseline[t]
            grad += log_prob_grad(particle, st.state, st.query) * (G[t] - b)
    grad /= len(trajectories)
    if not np.isfinite(grad).all():
        raise NumericError("Non-finite policy gradient.")
    return grad


def posterior_grad(particle: PolicyParticle, grad: np.ndarray, alpha: float,
                   prior: PriorSpec = PriorSpec()) -> np.ndarray:
    """grad / alpha plus the prior's score at the particle."""
    if not alpha > 0:
        raise InvalidInputError("alpha must be positive.")
    return grad / alpha + prior.score(particle.theta)


# Training

@dataclass
class TrainResult:
    ensemble: ParticleEnsemble
    answerer: AnswererModel
    metrics: List[MetricsRow] = field(default_factory=list)
    initial_distance: float = 0.0

    @property
    def final(self) -> Optional[MetricsRow]:
        return self.metrics[-1] if self.metrics else None

    @property
    def diversity_ratio(self) -> float:
        """Final over initial average pairwise particle distance."""
        if not self.metrics or self.initial_distance == 0.0:
            return 0.0
        return self.metrics[-1].avg_pairwise_particle_distance / self.initial_distance


def answer_records(scene: Scene, trajectory: Trajectory, objective: AnswererObjective,
                   eps: float) -> List[AnswerRecord]:
    records = []
    for st in trajectory.steps:
        goal = None
        if objective is AnswererObjective.GOAL:
            goal = np.array([executor_score(scene, st.state.history, (st.query, a),
                                            scene.target_index, eps) for a in Answer])
        records.append(AnswerRecord(st.state, st.query, st.answer, goal))
    return records


class Trainer:
    """Runs the training loop of a particle ensemble and an answerer model.

    Publishes `epoch_end`, `update_rejected` and `checkpoint_saved` signals.
    """

    def __init__(self, config: RunConfig, out_dir: Optional[str] = None,
                 config_hash: Optional[str] = None, resume: bool = False):
        self.config = config
        self.out_dir = out_dir
        self.config_hash = config_hash
        self.resume = resume
        self.prior = PriorSpec(config.prior_sigma)
        self.kernel = KernelConfig(config.bandwidth)
        self.start_epoch = 0
        self.initialize()

    def initialize(self):
        cf = self.config
        schema = cf.game.schema
        self.streams = make_streams(cf.seed, cf.n_particles)
        self.scenes = SceneSource(cf.game, self.streams.pool)
        self.ensemble = ParticleEnsemble.initialize(schema, cf.n_particles, self.streams.init,
                                                    cf.init_scale)
        self.answerer = AnswererModel.zeros(schema)
        self.baselines = [Baseline(cf.T_max, cf.baseline_decay) for _ in range(cf.n_particles)]
        self.stepper = (AdaptiveStepper(cf.step_theta, cf.svgd_adaptive_decay, cf.svgd_fudge)
                        if cf.svgd_adaptive else None)
        self.initial_distance = avg_pairwise_distance(self.ensemble)
        if self.resume and self.out_dir:
            path = latest_checkpoint(self.out_dir)
            if path is not None:
                self._restore(path)

    def _restore(self, path: str):
        ensemble, answerer, state = load_checkpoint(path, self.config.game.schema)
        if self.config_hash and state.get("config_hash") not in (None, self.config_hash):
            raise CheckpointError("Checkpoint {!r} was written with a different config.".format(
                path))
        if len(ensemble) != self.config.n_particles:
            raise CheckpointError("Checkpoint has {} particles, config has {}.".format(
                len(ensemble), self.config.n_particles))
        self.ensemble = ensemble
        self.answerer = answerer
        for bl, values in zip(self.baselines, state["baselines"]):
            bl.values = np.array(values, dtype=np.float64)
        self.streams.set_state(state["streams"])
        if self.stepper is not None:
            self.stepper.set_state(state.get("svgd_history"))
        self.initial_distance = state.get("initial_distance", self.initial_distance)
        self.start_epoch = int(state["epoch"]) + 1
        logging.notice("resumed from {} at epoch {}".format(path, self.start_epoch))

    def state(self, epoch: int) -> dict:
        return {
            "epoch": epoch,
            "config_hash": self.config_hash,
            "seed": self.config.seed,
            "baselines": [bl.values.tolist() for bl in self.baselines],
            "streams": self.streams.state(),
            "svgd_history": self.stepper.state() if self.stepper is not None else None,
            "initial_distance": self.initial_distance,
        }

    def checkpoint(self, epoch: int, name: Optional[str] = None, mark_latest: bool = True):
        if not self.out_dir:
            return None
        name = name or "epoch_{:04d}".format(epoch)
        path = save_checkpoint(self.out_dir, name, self.ensemble, self.answerer,
                               self.state(epoch), mark_latest=mark_latest)
        signals.checkpoint_saved.send(self, path=path, epoch=epoch)
        return path

    def run(self) -> TrainResult:
        cf = self.config
        result = TrainResult(self.ensemble, self.answerer, initial_distance=self.initial_distance)
        for epoch in range(self.start_epoch, cf.epochs):
            row = self.run_epoch(epoch)
            result.metrics.append(row)
            signals.epoch_end.send(self, row=row)
            if self._checkpoint_due(epoch):
                self.checkpoint(epoch)
        result.ensemble = self.ensemble
        result.answerer = self.answerer
        return result

    def _checkpoint_due(self, epoch: int) -> bool:
        every = self.config.checkpoint_every
        last = epoch == self.config.epochs - 1
        return last or (every > 0 and (epoch + 1) % every == 0)

    def run_epoch(self, epoch: int) -> MetricsRow:
        cf = self.config
        start = time.monotonic()
        eta = eta_schedule(epoch, cf.epochs, cf.eta0) if cf.intrinsic else 0.0
        scenes = [self.scenes.draw(self.streams.scenes) for _ in range(cf.episodes_per_epoch)]
        batches = []
        for particle, rng in zip(self.ensemble, self.streams.rollouts):
            batches.append([rollout(particle, cf, self.answerer, scene, rng, eta)
                            for scene in scenes])
        records = []
        for trajs in batches:
            for scene, traj in zip(scenes, trajs):
                records.extend(answer_records(scene, traj, cf.answerer_objective,
                                              cf.game.consistency_eps))
        self._update_answerer(epoch, records)
        try:
            grads = []
            for particle, bl, trajs in zip(self.ensemble, self.baselines, batches):
                g = reinforce_grad(particle, trajs, bl, cf.gamma)
                grads.append(posterior_grad(particle, g, cf.alpha, self.prior))
                bl.update(trajs, cf.gamma)
            directions = svgd_directions(self.ensemble, grads, self.kernel)
            if self.stepper is not None:
                self.stepper(self.ensemble, directions)
            else:
                svgd_step(self.ensemble, directions, cf.step_theta)
        except NumericError as err:
            self._diverged(epoch, err)
        if not self.ensemble.is_finite():
            self._diverged(epoch, None)
        all_trajs = [t for trajs in batches for t in trajs]
        gains = np.concatenate([t.intrinsic_gains for t in all_trajs])
        row = MetricsRow(
            epoch=epoch,
            mean_extrinsic_reward=float(np.mean([t.total_extrinsic for t in all_trajs])),
            mean_shaped_reward=float(np.mean([t.shaped_rewards.sum() for t in all_trajs])),
            success_rate=float(np.mean([t.success for t in all_trajs])),
            mean_intrinsic_gain=float(gains.mean()) if gains.size else 0.0,
            avg_pairwise_particle_distance=avg_pairwise_distance(self.ensemble),
            answerer_train_accuracy=accuracy(self.answerer, records),
            eta=eta,
            wall_clock_seconds=time.monotonic() - start,
        )
        logging.info("epoch {}: success {:.3f} reward {:.3f} gain {:.4f} distance {:.4f}".format(
            epoch, row.success_rate, row.mean_extrinsic_reward, row.mean_intrinsic_gain,
            row.avg_pairwise_particle_distance))
        return row

    def _update_answerer(self, epoch: int, records: List[AnswerRecord]):
        cf = self.config
        for _ in range(cf.answerer_updates):
            try:
                self.answerer = update_answerer(self.answerer, records, cf.step_omega,
                                                cf.answerer_objective)
            except NumericError as err:
                logging.warning("epoch {}: answerer update rejected: {}".format(epoch, err))
                signals.update_rejected.send(self, epoch=epoch, message=str(err))
                break

    def _diverged(self, epoch: int, err: Optional[Exception]):
        path = self.checkpoint(epoch, name="diverged_epoch_{:04d}".format(epoch),
                               mark_latest=False)
        msg = "Particle ensemble diverged at epoch {}".format(epoch)
        if path:
            msg += ", diagnostic checkpoint in {}".format(path)
        logging.error(msg)
        raise DivergenceError(msg, epoch=epoch, checkpoint=path) from err


def train(config: RunConfig, out_dir: Optional[str] = None, resume: bool = False,
          config_hash: Optional[str] = None) -> TrainResult:
    """Train an ensemble of questioning policies and an answerer model."""
    return Trainer(config, out_dir=out_dir, config_hash=config_hash, resume=resume).run()


# Evaluation

@dataclass
class EvalResult:
    episodes: int
    success_rate: float
    mean_extrinsic_reward: float
    decode: Selection
    split: str
    records: List[dict] = field(default_factory=list)


def evaluate(ensemble: ParticleEnsemble, answerer: AnswererModel, config: RunConfig,
             episodes: int, decode: Selection = Selection.GAIN, split: str = NEW_IMAGE,
             rng: Optional[np.random.Generator] = None, record: bool = False) -> EvalResult:
    """Play `episodes` games without learning.

    GAIN asks the best priced candidate of the whole ensemble; SAMPLE and
    GREEDY draw one particle per game and sample from, or take the mode of,
    its policy.
    """
    if episodes < 1:
        raise InvalidInputError("Need at least one evaluation episode.")
    if split not in SPLITS:
        raise InvalidInputError("Unknown split {!r}, use one of {}.".format(split, SPLITS))
    decode = Selection.from_name(decode)
    streams = make_streams(config.seed, config.n_particles)
    if rng is None:
        rng = streams.evaluation
    source = SceneSource(config.game, streams.pool)
    wins = 0
    total = 0.0
    records = []
    for _ in range(episodes):
        scene = source.draw_split(rng, split)
        if decode is Selection.GAIN:
            choose = ensemble_chooser(ensemble, config, answerer, scene, rng)
        else:
            particle = ensemble[int(rng.integers(len(ensemble)))]
            choose = particle_chooser(particle, config, answerer, scene, rng, decode)
        episode, traj = play(scene, config, answerer, choose, rng, intrinsic=False)
        wins += traj.success
        total += traj.total_extrinsic
        if record:
            records.append(episode_to_record(episode, traj))
    return EvalResult(episodes=episodes, success_rate=wins / episodes,
                      mean_extrinsic_reward=total / episodes, decode=decode, split=split,
                      records=records)

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

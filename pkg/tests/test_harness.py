"""
Unit tests for the seeker.harness package: metrics, checkpoints, baselines,
the SVGD benchmark and the command line runner.
"""

import math

import numpy as np
import pytest

from seeker import json
from seeker.answerer import AnswererModel
from seeker.core.constants import Selection
from seeker.core.exceptions import (BenchTargetError, CheckpointError, ConfigValueError,
                                    InvalidInputError)
from seeker.core.types import RunConfig
from seeker.harness import baselines, bench, checkpoint, metrics, runner, shell
from seeker.policy import ParticleEnsemble, PolicyParticle


def tiny_overrides(outdir, **more):
    overrides = {
        "outdir": str(outdir),
        "report": "csv",
        "seed": 7,
        "game.n_objects": 4,
        "game.schema": {"color": ["red", "blue"], "shape": ["cube", "ball"],
                        "size": ["small", "large"]},
        "game.T_max": 2,
        "seeker.n_particles": 2,
        "rl.epochs": 2,
        "rl.episodes_per_epoch": 3,
        "rl.candidates_per_particle": 1,
        "rl.checkpoint_every": 1,
        "gain.answer_samples": 3,
    }
    overrides.update(more)
    return overrides


class TestMetrics:

    def test_distance(self, schema):
        ens = ParticleEnsemble([PolicyParticle.zeros(schema), PolicyParticle.zeros(schema)])
        assert metrics.avg_pairwise_distance(ens) == 0.0
        ens[1].theta[0, 0] = 3.0
        ens[1].theta[1, 1] = 4.0
        assert metrics.avg_pairwise_distance(ens) == pytest.approx(5.0)
        assert metrics.avg_pairwise_distance(ParticleEnsemble(ens[:1])) == 0.0

    def test_row_columns(self):
        row = metrics.MetricsRow(0, 0.5, 0.6, 0.5, 0.0, 1.0, 0.9, 0.1, 2.5)
        assert len(row.formatted()) == len(metrics.MetricsRow.FIELDS)
        assert row.formatted(include_timing=True)[-1] == "2.5"

    def test_row_checks(self):
        with pytest.raises(InvalidInputError):
            metrics.MetricsRow(0, 0.5, 0.6, 1.5, 0.0, 1.0, 0.9, 0.1)
        with pytest.raises(InvalidInputError):
            metrics.MetricsRow(0, 0.5, 0.6, 0.5, 0.0, -1.0, 0.9, 0.1)


class TestBaselines:

    def test_none(self):
        cf = RunConfig()
        assert baselines.apply_baseline(cf, None) is cf
        assert baselines.apply_baseline(cf, "none") is cf

    def test_random(self):
        cf = baselines.apply_baseline(RunConfig(), "random")
        assert cf.n_particles == 1
        assert cf.step_theta == 0.0
        assert cf.init_scale == 0.0
        assert not cf.intrinsic

    def test_reinforce(self):
        cf = baselines.apply_baseline(RunConfig(), "reinforce")
        assert cf.n_particles == 1
        assert cf.eta0 == 0.0
        assert math.isinf(cf.prior_sigma)
        assert cf.rollout_selection is Selection.SAMPLE

    def test_entropy_only(self):
        cf = baselines.apply_baseline(RunConfig(alpha=0.5), "entropy-only")
        assert cf.alpha == 0.5
        assert cf.n_particles == RunConfig().n_particles
        assert cf.eta0 == 0.0

    def test_unknown(self):
        with pytest.raises(ConfigValueError):
            baselines.apply_baseline(RunConfig(), "oracle")


class TestCheckpoint:

    def test_roundtrip(self, tmp_path, schema, rng):
        ens = ParticleEnsemble.initialize(schema, 3, rng, 1.0)
        model = AnswererModel(rng.normal(size=AnswererModel.zeros(schema).omega.shape), schema)
        state = {"epoch": 4, "baselines": [[0.5, 0.25]]}
        path = checkpoint.save_checkpoint(str(tmp_path), "epoch_0004", ens, model, state)
        assert checkpoint.latest_checkpoint(str(tmp_path)) == path
        ens2, model2, state2 = checkpoint.load_checkpoint(path, schema)
        np.testing.assert_array_equal(ens2.to_array(), ens.to_array())
        np.testing.assert_array_equal(model2.omega, model.omega)
        assert state2 == state

    def test_latest_is_moved_only_when_asked(self, tmp_path, schema, rng):
        ens = ParticleEnsemble.initialize(schema, 2, rng)
        model = AnswererModel.zeros(schema)
        first = checkpoint.save_checkpoint(str(tmp_path), "epoch_0000", ens, model, {})
        checkpoint.save_checkpoint(str(tmp_path), "diverged_epoch_0001", ens, model, {},
                                   mark_latest=False)
        assert checkpoint.latest_checkpoint(str(tmp_path)) == first

    def test_missing(self, tmp_path, schema):
        assert checkpoint.latest_checkpoint(str(tmp_path)) is None
        with pytest.raises(CheckpointError):
            checkpoint.load_checkpoint(str(tmp_path / "nothing"), schema)


class TestBench:

    def test_gauss1d(self):
        report = bench.svgd_bench("gauss1d", n=50, steps=2000, step_size=0.05,
                                  rng=np.random.default_rng(0))
        assert abs(report.mean[0]) <= 0.1
        assert report.var[0] == pytest.approx(1.0, rel=0.15)

    def test_single_particle_finds_mode(self):
        start = bench.svgd_bench("gauss1d", n=1, steps=0, init=[[1.5]])
        assert start.mean[0] == 1.5
        # one particle follows the score: x <- x * (1 - step)
        report = bench.svgd_bench("gauss1d", n=1, steps=500, step_size=0.05, init=[[1.5]])
        assert report.mean[0] == pytest.approx(1.5 * 0.95 ** 500, rel=1e-9)
        assert abs(report.mean[0]) <= 1e-6
        report = bench.svgd_bench("gauss1d", n=1, steps=500, step_size=0.05, init=[[-1.5]])
        assert abs(report.mean[0]) <= 1e-6

    def test_init_shape(self):
        with pytest.raises(InvalidInputError):
            bench.svgd_bench("gauss1d", n=2, steps=1, init=[[1.5]])

    def test_mixture(self):
        report = bench.svgd_bench("mixture2-1d", n=50, steps=2000, step_size=0.05,
                                  rng=np.random.default_rng(0))
        assert report.target_var[0] == pytest.approx(5.0)
        assert report.mean_error <= 0.1
        assert report.var_rel_error <= 0.15
        assert min(report.mode_counts) >= 5
        assert "mixture2-1d" in report.format()

    def test_mixture_unmirrored(self):
        n = 50
        report = bench.svgd_bench("mixture2-1d", n=n, steps=2000, step_size=0.05,
                                  rng=np.random.default_rng(5), mirrored=False)
        X = bench.run_svgd(np.random.default_rng(5).normal(0.0, 1.0, size=(n, 1)),
                           bench.get_target("mixture2-1d").score, 2000, 0.05)[:, 0]
        assert report.mean[0] == pytest.approx(X.mean())
        right, left = X[X > 0], X[X <= 0]
        assert len(right) >= 10 and len(left) >= 10
        assert right.mean() == pytest.approx(2.0, abs=0.25)
        assert left.mean() == pytest.approx(-2.0, abs=0.25)
        # the mean is set by how the particles split between the modes
        assert report.mean[0] == pytest.approx(2.0 * (len(right) - len(left)) / n, abs=0.15)
        assert report.mean_error <= 0.4
        assert report.var_rel_error <= 0.2

    def test_mixture_2d_covers_modes(self):
        report = bench.svgd_bench("mixture2-2d", n=40, steps=1000, step_size=0.05,
                                  rng=np.random.default_rng(1))
        assert len(report.mode_counts) == 2
        assert report.mean_error <= 0.1

    def test_score(self):
        target = bench.get_target("gauss1d")
        np.testing.assert_allclose(target.score(np.array([[1.5], [-2.0]])), [[-1.5], [2.0]])

    def test_unknown_target(self):
        with pytest.raises(BenchTargetError):
            bench.svgd_bench("banana")

    def test_bad_arguments(self):
        with pytest.raises(InvalidInputError):
            bench.svgd_bench("gauss1d", n=0)


class TestShell:

    def test_overrides(self):
        args = {"--seed": "3", "--alpha": "0.5", "--utility": "exp", "--resume": True,
                "--debug": False, "--out": None}
        assert shell.overrides_from(args) == {"seed": 3, "rl.alpha": 0.5,
                                              "gain.utility": "exp", "flags.resume": 1}

    def test_bad_override_value(self):
        assert shell.main(["train", "--seed", "many"]) == runner.EXIT_USAGE

    def test_bad_option(self):
        assert shell.main(["train", "--no-such-option"]) == runner.EXIT_USAGE

    def test_show_config(self, capsys):
        assert shell.main(["train", "--show-config", "--seed", "5"]) == runner.EXIT_OK
        out = capsys.readouterr().out
        assert "seed = 5" in out
        assert "rl.alpha = 0.01" in out

    def test_missing_config(self, tmp_path):
        out = tmp_path / "run"
        status = shell.main(["train", "--config", str(tmp_path / "missing.yaml"),
                             "--out", str(out)])
        assert status == runner.EXIT_USAGE
        assert not out.exists()


class TestRunExperiment:

    def test_unknown_command(self):
        assert runner.run_experiment(command="fly") == runner.EXIT_USAGE

    def test_bad_value(self, tmp_path):
        status = runner.run_experiment(overrides=tiny_overrides(tmp_path, **{"rl.alpha": -1}))
        assert status == runner.EXIT_USAGE

    def test_reproducible_metrics(self, tmp_path):
        texts = []
        for name in ("a", "b"):
            status = runner.run_experiment(overrides=tiny_overrides(tmp_path / name))
            assert status == runner.EXIT_OK
            texts.append((tmp_path / name / "metrics.csv").read_bytes())
        assert texts[0] == texts[1]
        lines = texts[0].decode("ascii").splitlines()
        assert lines[0].startswith("# config_sha256=")
        assert lines[0].endswith(" seed=7")
        assert len(lines) == 4

    def test_artifacts(self, tmp_path):
        assert runner.run_experiment(overrides=tiny_overrides(tmp_path)) == runner.EXIT_OK
        summary = json.from_file(str(tmp_path / "summary.json"))
        assert summary["epochs"] == 2
        assert summary["seed"] == 7
        assert 0.0 <= summary["final"]["success_rate"] <= 1.0
        assert checkpoint.latest_checkpoint(str(tmp_path)).endswith("epoch_0001")

    def test_resume_between_checkpoints(self, tmp_path):
        overrides = tiny_overrides(tmp_path, **{"rl.epochs": 5, "rl.checkpoint_every": 2})
        assert runner.run_experiment(overrides=overrides) == runner.EXIT_OK
        full = (tmp_path / "metrics.csv").read_text()
        # As if stopped during epoch 4: rows up to epoch 3, checkpoint at epoch 1.
        (tmp_path / "checkpoints" / "latest").write_text("epoch_0001\n")
        (tmp_path / "metrics.csv").write_text("".join(full.splitlines(True)[:-1]))
        resumed = dict(overrides, **{"flags.resume": 1})
        assert runner.run_experiment(overrides=resumed) == runner.EXIT_OK
        text = (tmp_path / "metrics.csv").read_text()
        assert [line.split(",")[0] for line in text.splitlines()[2:]] == \
            ["0", "1", "2", "3", "4"]
        assert text == full

    def test_eval_record_and_replay(self, tmp_path, capsys):
        assert runner.run_experiment(overrides=tiny_overrides(tmp_path)) == runner.EXIT_OK
        before = (tmp_path / "metrics.csv").read_bytes()
        record = tmp_path / "episodes.jsonl"
        status = runner.run_experiment(
            overrides=tiny_overrides(tmp_path, **{"eval.episodes": 4,
                                                  "eval.record": str(record)}),
            command="eval")
        assert status == runner.EXIT_OK
        assert (tmp_path / "metrics.csv").read_bytes() == before
        with open(record) as fo:
            records = list(json.read_records(fo))
        assert len(records) == 4
        capsys.readouterr()
        status = runner.run_experiment(overrides=tiny_overrides(tmp_path), command="replay",
                                       argument=str(record))
        assert status == runner.EXIT_OK
        out = capsys.readouterr().out
        assert out.count("episode ") == 4
        assert "guess" in out

    def test_eval_without_checkpoint(self, tmp_path):
        status = runner.run_experiment(overrides=tiny_overrides(tmp_path), command="eval")
        assert status == runner.EXIT_ERROR

    def test_replay_missing_file(self, tmp_path):
        status = runner.run_experiment(overrides=tiny_overrides(tmp_path), command="replay",
                                       argument=str(tmp_path / "none.jsonl"))
        assert status == runner.EXIT_USAGE

    def test_bench(self, tmp_path):
        status = runner.run_experiment(
            overrides=tiny_overrides(tmp_path, **{"bench.target": "gauss1d",
                                                  "bench.steps": 50}),
            command="svgd-bench")
        assert status == runner.EXIT_OK
        status = runner.run_experiment(
            overrides=tiny_overrides(tmp_path, **{"bench.target": "banana"}),
            command="svgd-bench")
        assert status == runner.EXIT_USAGE

    def test_divergence(self, tmp_path):
        overrides = tiny_overrides(tmp_path, **{"rl.alpha": 1e-320,
                                                "game.question_penalty": 0.1})
        assert runner.run_experiment(overrides=overrides) == runner.EXIT_DIVERGED
        assert (tmp_path / "checkpoints" / "diverged_epoch_0000").is_dir()

    def test_baseline_run(self, tmp_path):
        overrides = tiny_overrides(tmp_path, baseline="random")
        assert runner.run_experiment(overrides=overrides) == runner.EXIT_OK

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

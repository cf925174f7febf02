# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Experiment runner.

Loads the configuration, sets up logging, the output directory and reports,
then runs one command: train, eval, svgd-bench or replay. Returns a process
exit status:

    0   success
    1   other error
    2   usage or configuration error
    3   numeric divergence during training
"""

import os
import sys
from datetime import datetime, timezone

import numpy as np

from .. import config
from .. import json
from .. import logging
from .. import reports
from ..core.constants import Selection
from ..core.exceptions import (SeekerError, ConfigError, UsageError, BenchTargetError,
                               DivergenceError, ReportFindError, CheckpointError)
from ..core.types import RunConfig
from ..env import scene_from_record, history_from_record
from ..rl import train, evaluate
from ..executor import candidate_posterior
from ..signals import run_start, run_end, run_error, eval_result, bench_result, report_comment
from ..svgd import KernelConfig
from .baselines import apply_baseline
from .bench import svgd_bench
from .checkpoint import latest_checkpoint, load_checkpoint

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3

COMMANDS = ("train", "eval", "svgd-bench", "replay")


class ExperimentRunner:
    """Runs one command of the harness.

    Handles the output directory, the report and run start and end signals,
    and turns errors into exit statuses.
    """

    def __init__(self, cf):
        self.config = cf
        self.report = None

    def initialize(self, make_outdir=True):
        cf = self.config
        logging.openlog(ident="seeker", usestderr=bool(cf.flags.stderr))
        if cf.flags.debug:
            logging.loglevel("DEBUG")
        outdir = cf.get("outdir")
        if not outdir:
            resultsdir = os.path.expandvars(os.path.expanduser(cf.resultsdir))
            ts = datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S")
            outdir = os.path.join(resultsdir, ts)
        outdir = os.path.expandvars(os.path.expanduser(outdir))
        if make_outdir:
            os.makedirs(outdir, exist_ok=True)
        cf.outdir = outdir
        cf.config_sha256 = config.config_hash(cf)
        self.initialize_report()
        run_start.send(self, time=datetime.now(timezone.utc), config_hash=cf.config_sha256)
        comment = cf.get("comment")
        if comment:
            report_comment.send(self, message=comment)

    def initialize_report(self):
        cf = self.config
        try:
            rpt = reports.get_report(cf.get("report", "default"))
        except ReportFindError as err:
            raise UsageError(str(err)) from err
        rpt.initialize(config=cf)
        self.report = rpt

    def finalize(self, result=None):
        run_end.send(self, time=datetime.now(timezone.utc), result=result)
        if self.report is not None:
            self.report.finalize()
            self.report = None
        logging.close()

    def run_config(self) -> RunConfig:
        cf = self.config
        return apply_baseline(RunConfig.from_config(cf), cf.get("baseline"))

    def train(self):
        cf = self.config
        runcf = self.run_config()
        self.initialize()
        result = None
        try:
            result = train(runcf, out_dir=cf.outdir, resume=bool(cf.flags.resume),
                           config_hash=cf.config_sha256)
            self.write_summary(result)
        except SeekerError as err:
            run_error.send(self, exc=err)
            raise
        finally:
            self.finalize(result)
        return result

    def write_summary(self, result):
        cf = self.config
        final = result.final
        summary = {
            "config_sha256": cf.config_sha256,
            "seed": cf.seed,
            "baseline": cf.get("baseline"),
            "epochs": len(result.metrics),
            "final": final,
            "initial_distance": result.initial_distance,
            "diversity_ratio": result.diversity_ratio,
        }
        with open(os.path.join(cf.outdir, "summary.json"), "w", encoding="utf8") as fo:
            json.dump(summary, fo)

    def evaluate(self):
        cf = self.config
        runcf = self.run_config()
        self.initialize(make_outdir=False)
        try:
            path = cf.eval.get("checkpoint") or latest_checkpoint(cf.outdir)
            if path is None:
                raise CheckpointError("No checkpoint found in {!r}.".format(cf.outdir))
            ensemble, answerer, _ = load_checkpoint(path, runcf.game.schema)
            result = evaluate(ensemble, answerer, runcf, int(cf.eval.episodes),
                              decode=Selection.from_name(cf.eval.decode), split=cf.eval.split,
                              record=bool(cf.eval.get("record")))
            eval_result.send(self, result=result)
            if cf.eval.get("record"):
                with open(cf.eval.record, "w", encoding="utf8") as fo:
                    json.write_records(fo, result.records)
        except SeekerError as err:
            run_error.send(self, exc=err)
            raise
        finally:
            self.finalize()
        return result

    def bench(self):
        cf = self.config
        bcf = cf.bench
        self.initialize(make_outdir=False)
        try:
            report = svgd_bench(bcf.target, n=int(bcf.particles), steps=int(bcf.steps),
                                step_size=float(bcf.step_size),
                                rng=np.random.default_rng(int(cf.seed)),
                                init_scale=float(bcf.init_scale),
                                kernel_config=KernelConfig(cf.svgd.bandwidth))
            bench_result.send(self, report=report)
        except SeekerError as err:
            run_error.send(self, exc=err)
            raise
        finally:
            self.finalize()
        return report

    def replay(self, filename, file=None):
        """Print recorded episodes with the executor's belief after each answer."""
        file = file or sys.stdout
        if not os.path.isfile(filename):
            raise UsageError("No episode record file {!r}.".format(filename))
        eps = float(self.config.game.consistency_eps)
        with open(filename, encoding="utf8") as fo:
            for i, rec in enumerate(json.read_records(fo)):
                scene = scene_from_record(rec["scene"])
                history = history_from_record(rec)
                print("episode {}: target {} ({})".format(
                    i, scene.target.id, _describe(scene, scene.target)), file=file)
                for t in range(1, len(history) + 1):
                    query, answer = history[t - 1]
                    post = candidate_posterior(scene, history[:t], eps)
                    print("  {}? {}  -> top {} p={:.4f}".format(
                        query.describe(scene.schema), answer, post.top_id(),
                        post.probs.max()), file=file)
                print("  guess {} {}".format(
                    rec.get("guess"), "success" if rec.get("success") else "fail"), file=file)


def _describe(scene, obj):
    schema = scene.schema
    return ", ".join(schema.values[i][v] for i, v in enumerate(obj.attribute_values))


def run_experiment(config_path=None, overrides=None, command="train", argument=None):
    """Run a harness command and return the exit status."""
    if command not in COMMANDS:
        print("Unknown command {!r}.".format(command), file=sys.stderr)
        return EXIT_USAGE
    try:
        cf = config.load_config(overrides or {}, config_path)
    except ConfigError as err:
        print("Configuration error: {}".format(err), file=sys.stderr)
        return EXIT_USAGE
    runner = ExperimentRunner(cf)
    try:
        if command == "train":
            runner.train()
        elif command == "eval":
            runner.evaluate()
        elif command == "svgd-bench":
            runner.bench()
        else:
            runner.replay(argument)
    except DivergenceError as err:
        print("Diverged: {}".format(err), file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, UsageError, BenchTargetError) as err:
        print("Error: {}".format(err), file=sys.stderr)
        return EXIT_USAGE
    except SeekerError as err:
        logging.exception_error(command, err)
        print("Error: {}".format(logging.format_exception(err)), file=sys.stderr)
        if cf.flags.debug:
            import pdb
            pdb.post_mortem(err.__traceback__)
        return EXIT_ERROR
    return EXIT_OK

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

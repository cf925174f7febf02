# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Default report: a colored line per epoch and a summary on the terminal.
"""

import sys

from .. import logging
from . import BaseReport

RESET = "\x1b[0m"

UNDERLINE_ON = "\x1b[4m"
INVERSE_ON = "\x1b[7m"
INVERSE_OFF = "\x1b[27m"

RED = "\x1b[31m"
GREEN = "\x1b[32m"
YELLOW = "\x1b[33m"
BLUE = "\x1b[34m"
MAGENTA = "\x1b[35m"
CYAN = "\x1b[36m"
WHITE = "\x1b[01m"


def white(text):
    return WHITE + text + RESET


def green(text):
    return GREEN + text + RESET


def red(text):
    return RED + text + RESET


def blue(text):
    return BLUE + text + RESET


def yellow(text):
    return YELLOW + text + RESET


def cyan(text):
    return CYAN + text + RESET


def magenta(text):
    return MAGENTA + text + RESET


def inverse_red(text):
    return INVERSE_ON + RED + text + RESET + INVERSE_OFF


class DefaultReport(BaseReport):

    def initialize(self, config=None):
        self._file = sys.stdout
        self._previous = None
        super().initialize(config=config)

    def finalize(self):
        super().finalize()
        self._file = None

    def on_run_start(self, runner, time=None, config_hash=None):
        ts = time.isoformat() if time is not None else ""
        print("Run start at {}, config {}.".format(blue(ts), (config_hash or "?")[:12]),
              file=self._file)

    def on_epoch_end(self, trainer, row=None):
        success = "{:6.3f}".format(row.success_rate)
        if self._previous is not None and row.success_rate > self._previous:
            success = green(success)
        elif self._previous is not None and row.success_rate < self._previous:
            success = yellow(success)
        self._previous = row.success_rate
        print("epoch {:4d}  success {}  reward {:7.4f}  gain {:8.5f}  distance {:8.5f}"
              "  answerer {:5.3f}  eta {:.4f}".format(
                  row.epoch, success, row.mean_extrinsic_reward, row.mean_intrinsic_gain,
                  row.avg_pairwise_particle_distance, row.answerer_train_accuracy, row.eta),
              file=self._file)

    def on_update_rejected(self, trainer, epoch=None, message=None):
        print(yellow(" rejected:"), "epoch", epoch, message, file=self._file)

    def on_checkpoint_saved(self, trainer, path=None, epoch=None):
        print(cyan(" checkpoint:"), path, file=self._file)

    def on_run_error(self, runner, exc=None):
        print("{}: {}".format(inverse_red("ERROR"), logging.format_exception(exc)),
              file=self._file)

    def on_run_end(self, runner, time=None, result=None):
        if result is not None and getattr(result, "final", None) is not None:
            final = result.final
            print("{} final success {}, diversity ratio {:.3f}".format(
                white("Summary:"), green("{:.3f}".format(final.success_rate)),
                result.diversity_ratio), file=self._file)
        ts = time.isoformat() if time is not None else ""
        print("Run end at {}.".format(blue(ts)), file=self._file)

    def on_eval_result(self, runner, result=None):
        print("{} {} episodes, decode {}, split {}: success {}, reward {:.4f}".format(
            white("Evaluation:"), result.episodes, result.decode.name.lower(), result.split,
            green("{:.3f}".format(result.success_rate)), result.mean_extrinsic_reward),
            file=self._file)

    def on_bench_result(self, runner, report=None):
        print(report.format(), file=self._file)

    def on_run_comment(self, runner, message=None):
        print(magenta("comment:"), message, file=self._file)

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Shell UI (command) for the experiment harness.

Collects options and arguments from the command line, turns them into
configuration overrides, then invokes the runner.
"""

import sys

from docopt import docopt, DocoptExit

from .. import config
from ..core.exceptions import ConfigError
from . import runner


USAGE = r"""seeker - train and evaluate information-seeking question policies.

Usage:
    seeker train [options] [--baseline NAME] [--epochs N] [--resume]
    seeker eval [options] [--decode MODE] [--split SPLIT] [--episodes N]
                [--checkpoint DIR] [--record FILE]
    seeker svgd-bench [options] [--target NAME] [-n N] [--steps N] [--step-size F]
    seeker replay [options] <recordfile>
    seeker -h | --help

Options:
    -h --help           This help.
    -c --config PATH    YAML experiment file merged over the defaults.
    -C --show-config    Show configuration, after overrides applied, and exit.
    -s --seed U64       Random seed.
    -o --out DIR        Output directory for metrics and checkpoints.
    -r --report NAME    Report(s) to send output to, e.g. "default,csv".
    -d --debug          Debug mode. Enter a debugger on error.
    -E --stderr         Also log to stderr.
    --particles N       Number of policy particles.
    --alpha F           Temperature of the policy posterior.
    --beta F            Confidence multiplier of the gain bound.
    --eta0 F            Initial weight of the intrinsic reward.
    --utility KIND      Gain utility, entropy or exp.
    --baseline NAME     Train a comparison method: random, reinforce, entropy-only.
    --epochs N          Number of training epochs.
    --resume            Continue from the latest checkpoint in the output directory.
    --decode MODE       Question choice at evaluation: gain, sample or greedy.
    --split SPLIT       Evaluation scenes: new-image or new-object.
    --episodes N        Number of evaluation games.
    --checkpoint DIR    Checkpoint directory to evaluate (default: latest).
    --record FILE       Write evaluated episodes as JSON lines to FILE.
    --target NAME       Benchmark target: gauss1d, mixture2-1d, mixture2-2d.
    -n N                Number of benchmark particles.
    --steps N           Number of benchmark steps.
    --step-size F       Benchmark step size.

Example:

    seeker train --seed 3 --out /tmp/run3 --particles 10 --utility exp
    seeker eval --out /tmp/run3 --decode greedy --split new-object
"""

# option -> (config key, converter)
_OVERRIDES = {
    "--seed": ("seed", int),
    "--out": ("outdir", str),
    "--report": ("report", str),
    "--particles": ("seeker.n_particles", int),
    "--alpha": ("rl.alpha", float),
    "--beta": ("gain.beta", float),
    "--eta0": ("gain.eta0", float),
    "--utility": ("gain.utility", str),
    "--baseline": ("baseline", str),
    "--epochs": ("rl.epochs", int),
    "--decode": ("eval.decode", str),
    "--split": ("eval.split", str),
    "--episodes": ("eval.episodes", int),
    "--checkpoint": ("eval.checkpoint", str),
    "--record": ("eval.record", str),
    "--target": ("bench.target", str),
    "-n": ("bench.particles", int),
    "--steps": ("bench.steps", int),
    "--step-size": ("bench.step_size", float),
}

_FLAGS = {
    "--debug": "flags.debug",
    "--stderr": "flags.stderr",
    "--resume": "flags.resume",
}


def _command(args):
    for cmd in runner.COMMANDS:
        if args.get(cmd):
            return cmd
    return None


def overrides_from(args):
    """Configuration overrides, as dotted keys, from parsed arguments."""
    overrides = {}
    for opt, (key, conv) in _OVERRIDES.items():
        value = args.get(opt)
        if value is not None:
            try:
                overrides[key] = conv(value)
            except ValueError:
                raise ConfigError("Bad value for {}: {!r}".format(opt, value)) from None
    for opt, key in _FLAGS.items():
        if args.get(opt):
            overrides[key] = 1
    return overrides


def main(argv=None):
    try:
        args = docopt(USAGE, argv=argv if argv is not None else sys.argv[1:])
    except DocoptExit as err:
        print(err, file=sys.stderr)
        return runner.EXIT_USAGE
    try:
        overrides = overrides_from(args)
    except ConfigError as err:
        print(err, file=sys.stderr)
        return runner.EXIT_USAGE
    if args.get("--show-config"):
        try:
            cf = config.load_config(overrides, args.get("--config"))
        except ConfigError as err:
            print("Configuration error: {}".format(err), file=sys.stderr)
            return runner.EXIT_USAGE
        config.show_config(cf)
        return runner.EXIT_OK
    return runner.run_experiment(args.get("--config"), overrides, _command(args),
                                 argument=args.get("<recordfile>"))


if __name__ == "__main__":
    sys.exit(main())

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

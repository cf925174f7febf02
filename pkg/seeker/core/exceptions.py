# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""All common exceptions."""


class SeekerError(Exception):
    """Base class for errors raised by the seeker package."""


# domain errors
class InvalidInputError(SeekerError, ValueError):
    """An argument is outside the domain of the operation, or shapes do not
    match.
    """


class UtilityDomainError(InvalidInputError):
    """A utility was evaluated outside of its domain (u_entropy of a score
    that is not positive).
    """


class InvalidStateError(SeekerError):
    """The operation is not allowed in the current state, such as stepping an
    episode that is already finished.
    """


# numeric errors
class NumericError(SeekerError, ArithmeticError):
    """An update produced non-finite values and was rejected."""


class DivergenceError(NumericError):
    """Training diverged: some particle parameters became non-finite.

    Attributes:
        epoch: the epoch at which it was detected.
        checkpoint: path of the diagnostic checkpoint, if one was written.
    """

    def __init__(self, message, epoch=None, checkpoint=None):
        super().__init__(message)
        self.epoch = epoch
        self.checkpoint = checkpoint


# configuration errors
class ConfigError(SeekerError):
    """Base class for exceptions raised when querying a configuration.
    """


class ConfigNotFoundError(ConfigError):
    """A requested value, or configuration file, could not be found.
    """


class ConfigValueError(ConfigError):
    """The value in the configuration is illegal."""


class ConfigTypeError(ConfigValueError):
    """The value in the configuration did not match the expected type.
    """


# harness errors
class HarnessError(SeekerError):
    """Base class for errors of the experiment harness."""


class UsageError(HarnessError):
    """Bad command line usage."""


class CheckpointError(HarnessError):
    """A checkpoint could not be written or read back."""


class BenchTargetError(HarnessError, InvalidInputError):
    """Unknown sampler benchmark target."""


# Errors in report objects
class ReportError(HarnessError):
    pass


class ReportFindError(ReportError):
    """Can't find requested report."""


# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab:fileencoding=utf-8

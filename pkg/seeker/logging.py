# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Light logging module that writes to the system's syslog service. Log
destination configuration should be done there.

Training loops log from inner code paths, so messages go straight to the
system logger with no handler chain or formatting objects in between.

Configurable with the following environment variables:

SEEKER_LOG_FACILITY
    Sets the syslog facility to use, default USER.

SEEKER_LOG_LEVEL
    Sets the syslog level to log, default NOTICE.

SEEKER_LOG_STDERR
    Set to include stderr in log output.

View log output in a shell like this:

    $ journalctl --identifier=seeker --priority=debug
"""

import sys
import os
import syslog

# The stock logging module is configured here to forward records of
# third-party packages. Avoid using it in other code.
import logging

FACILITY = os.environ.get("SEEKER_LOG_FACILITY", "USER")
LEVEL = os.environ.get("SEEKER_LOG_LEVEL", "NOTICE")
USESTDERR = bool(os.environ.get("SEEKER_LOG_STDERR"))


_oldloglevel = syslog.setlogmask(syslog.LOG_UPTO(
    getattr(syslog, "LOG_" + LEVEL)))


def openlog(ident="seeker", usestderr=USESTDERR, facility=FACILITY):
    opts = syslog.LOG_PID | syslog.LOG_PERROR if usestderr else syslog.LOG_PID
    if isinstance(facility, str):
        facility = getattr(syslog, "LOG_" + facility)
    syslog.openlog(ident=ident, logoption=opts, facility=facility)


def close():
    syslog.closelog()


def debug(msg):
    syslog.syslog(syslog.LOG_DEBUG, _encode(msg))


def info(msg):
    syslog.syslog(syslog.LOG_INFO, _encode(msg))


def notice(msg):
    syslog.syslog(syslog.LOG_NOTICE, _encode(msg))


def warning(msg):
    syslog.syslog(syslog.LOG_WARNING, _encode(msg))


def error(msg):
    syslog.syslog(syslog.LOG_ERR, _encode(msg))


def critical(msg):
    syslog.syslog(syslog.LOG_CRIT, _encode(msg))


def _encode(o):
    # Causes UTF8 BOM to be added to message per RFC-5424
    return '\ufeff' + str(o).replace("\r\n", " ")


def loglevel(level):
    global _oldloglevel
    if isinstance(level, str):
        level = LEVELS[level.upper()]
    _oldloglevel = syslog.setlogmask(syslog.LOG_UPTO(level))


def get_loglevel():
    mask = syslog.setlogmask(0)
    for level in (syslog.LOG_DEBUG, syslog.LOG_INFO, syslog.LOG_NOTICE,
                  syslog.LOG_WARNING, syslog.LOG_ERR, syslog.LOG_CRIT):
        if syslog.LOG_MASK(level) & mask:
            return level


def loglevel_restore():
    syslog.setlogmask(_oldloglevel)


# common logging patterns
def exception_error(prefix, ex):
    error("{}: {}".format(prefix, format_exception(ex)))


def exception_warning(prefix, ex):
    warning("{}: {}".format(prefix, format_exception(ex)))


def format_exception(ex):
    """One-line rendering of an exception and its chained context and cause."""
    s = ["{} ({})".format(ex.__class__.__name__, ex)]
    orig = ex
    while ex.__context__ is not None:
        ex = ex.__context__
        s.append(" Within: {} ({})".format(ex.__class__.__name__, ex))
    ex = orig
    while ex.__cause__ is not None:
        ex = ex.__cause__
        s.append(" From: {} ({})".format(ex.__class__.__name__, ex))
    return " | ".join(s)


# Allow use of names, and useful aliases, to select logging level.
LEVELS = {
    "DEBUG": syslog.LOG_DEBUG,
    "INFO": syslog.LOG_INFO,
    "NOTICE": syslog.LOG_NOTICE,
    "WARNING": syslog.LOG_WARNING,
    "WARN": syslog.LOG_WARNING,
    "ERR": syslog.LOG_ERR,
    "ERROR": syslog.LOG_ERR,
    "CRIT": syslog.LOG_CRIT,
    "CRITICAL": syslog.LOG_CRIT,
}
LEVELS_REV = dict((v, k) for k, v in list(LEVELS.items()))

_LOGGING_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "NOTICE": logging.WARNING,
    "WARNING": logging.WARNING,
    "WARN": logging.WARNING,
    "ERR": logging.ERROR,
    "ERROR": logging.ERROR,
    "CRIT": logging.CRITICAL,
    "CRITICAL": logging.CRITICAL,
}

_LEVEL_MAP = {
    logging.CRITICAL: syslog.LOG_CRIT,
    logging.ERROR: syslog.LOG_ERR,
    logging.WARNING: syslog.LOG_WARNING,
    logging.INFO: syslog.LOG_INFO,
    logging.DEBUG: syslog.LOG_DEBUG,
}


class LogLevel:
    """Context manager to run a block of code at a specific log level.

    Supply the level name as a string.
    """
    def __init__(self, level):
        self._level = LEVELS[level.upper()]

    def __enter__(self):
        self._oldloglevel = syslog.setlogmask(syslog.LOG_UPTO(self._level))

    def __exit__(self, extype, exvalue, traceback):
        syslog.setlogmask(self._oldloglevel)


class SyslogHandler(logging.Handler):
    """Handler for the stock logging module that forwards to syslog. This is
    for third-party packages (numpy, scipy, confuse) that use the logging
    module.
    """

    def emit(self, record):
        try:
            msg = "{}: {}".format(record.name, record.getMessage())
            syslog.syslog(_LEVEL_MAP.get(record.levelno, syslog.LOG_INFO), _encode(msg))
        except Exception:  # noqa
            self.handleError(record)


logging.root.addHandler(SyslogHandler())
logging.root.level = _LOGGING_LEVELS.get(LEVEL, logging.WARNING)


if __name__ == "__main__":
    openlog("seeker-logtest", usestderr=True)
    warning("a warning")
    notice("A notice")
    debug("You don't see me")
    with LogLevel("DEBUG"):
        debug("You see me in debug level context manager")
    try:
        raise AttributeError("bogus attr error") from KeyError("chained key error")
    except AttributeError as err:
        exception_error("testing exception_error", err)
    sys.exit(0)

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab:fileencoding=utf-8

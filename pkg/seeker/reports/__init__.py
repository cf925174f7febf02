# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Base class and factory functions for reporting objects.
"""

import importlib

from ..signals import (run_start, run_end, run_error, epoch_end, update_rejected,
                       checkpoint_saved, eval_result, bench_result, report_comment)
from ..core.exceptions import ReportFindError


class BaseReport:
    """Base report that all run-time reports should inherit from."""

    def initialize(self, config=None):
        run_start.connect(self.on_run_start)
        run_end.connect(self.on_run_end)
        run_error.connect(self.on_run_error)
        epoch_end.connect(self.on_epoch_end)
        update_rejected.connect(self.on_update_rejected)
        checkpoint_saved.connect(self.on_checkpoint_saved)
        eval_result.connect(self.on_eval_result)
        bench_result.connect(self.on_bench_result)
        report_comment.connect(self.on_run_comment)

    def finalize(self):
        run_start.disconnect(self.on_run_start)
        run_end.disconnect(self.on_run_end)
        run_error.disconnect(self.on_run_error)
        epoch_end.disconnect(self.on_epoch_end)
        update_rejected.disconnect(self.on_update_rejected)
        checkpoint_saved.disconnect(self.on_checkpoint_saved)
        eval_result.disconnect(self.on_eval_result)
        bench_result.disconnect(self.on_bench_result)
        report_comment.disconnect(self.on_run_comment)

    def on_run_start(self, runner, time=None, config_hash=None):
        pass

    def on_run_end(self, runner, time=None, result=None):
        pass

    def on_run_error(self, runner, exc=None):
        pass

    def on_epoch_end(self, trainer, row=None):
        pass

    def on_update_rejected(self, trainer, epoch=None, message=None):
        pass

    def on_checkpoint_saved(self, trainer, path=None, epoch=None):
        pass

    def on_eval_result(self, runner, result=None):
        pass

    def on_bench_result(self, runner, report=None):
        pass

    def on_run_comment(self, runner, message=None):
        pass


class NullReport(BaseReport):
    """A report that emits nothing."""
    pass


class StackedReport(list, BaseReport):
    """A report that contains a collection of other reports.
    """

    def initialize(self, config=None):
        for rpt in self:
            rpt.initialize(config=config)

    def finalize(self):
        for rpt in self:
            rpt.finalize()


def _first_report_in(mod):
    for name in dir(mod):
        obj = getattr(mod, name)
        if isinstance(obj, type) and issubclass(obj, BaseReport):
            if obj in (BaseReport, NullReport, StackedReport):
                continue
            return obj()
    return None


def get_report(rname):
    """Report object factory.

    Return a report object given a name, as a string. The name may be a comma
    separated list of names in which case a "stacked" report will be returned.
    The names should match the name of a module found in this subpackage. The
    first report object found in it will be returned. If the name contains a dot
    as separator then it is a full path to a report class.

    Some names are special. The name *null* returns a NullReport, it emits
    nothing. You can also use *default* for the default report that writes to
    the terminal.
    """
    if "," in rname:
        rnames = [name.strip() for name in rname.split(",")]
        rpt = StackedReport()
        for subname in rnames:
            rpt.append(get_report(subname))
        return rpt
    elif rname.startswith("default"):
        from . import default
        return default.DefaultReport()
    elif rname.startswith("null"):
        return NullReport()
    elif "." in rname:
        modname, _, clsname = rname.rpartition(".")
        try:
            robj = getattr(importlib.import_module(modname), clsname)
        except (ImportError, AttributeError) as ierr:
            raise ReportFindError(
                "No report class {!r} found.".format(rname)) from ierr
        return robj()
    else:
        # name is taken as a module name in this package. First subclass of
        # BaseReport found in there is used.
        try:
            mod = importlib.import_module("." + rname, package=__name__)
        except ImportError:
            raise ReportFindError(
                "No report module {!r} found.".format(rname)) from None
        rpt = _first_report_in(mod)
        if rpt is None:
            raise ReportFindError(
                "No report found in report module {!r}.".format(rname))
        return rpt

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Metrics file report.

Writes OUT/<metrics.filename>:

    # config_sha256=<hex> seed=<n>
    epoch,mean_extrinsic_reward,...
    0,0.125,...

The column order is fixed. Wall clock time is only written when
`metrics.include_timing` is set, since it differs between runs.
"""

import os
import csv

from . import BaseReport
from ..harness.metrics import MetricsRow


class CSVReport(BaseReport):

    def initialize(self, config=None):
        self._file = None
        self._writer = None
        cf = config if config is not None else {}
        metrics = cf.get("metrics", {})
        self.include_timing = bool(metrics.get("include_timing", False))
        self.outdir = cf.get("outdir")
        self.filename = (os.path.join(self.outdir, metrics.get("filename", "metrics.csv"))
                         if self.outdir else None)
        self.resume = bool(cf.get("flags", {}).get("resume"))
        self.header = "# config_sha256={} seed={}\n".format(
            cf.get("config_sha256", ""), cf.get("seed", ""))
        super().initialize(config=config)

    # Opened on the first row, so eval and bench runs leave the file alone.
    # A resumed run restarts at its last checkpoint; rows from `first_epoch`
    # on were written after it and are dropped before appending.
    def _open(self, first_epoch):
        append = self.resume and os.path.exists(self.filename)
        if append:
            self._truncate(first_epoch)
        self._file = open(self.filename, "a" if append else "w", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        if not append:
            self._file.write(self.header)
            self._writer.writerow(MetricsRow.columns(self.include_timing))

    def _truncate(self, first_epoch):
        with open(self.filename, newline="") as fo:
            lines = fo.readlines()
        kept = []
        for line in lines:
            head = line.split(",", 1)[0]
            if head.isdigit() and int(head) >= first_epoch:
                continue
            kept.append(line)
        with open(self.filename, "w", newline="") as fo:
            fo.writelines(kept)

    def finalize(self):
        super().finalize()
        if self._file is not None:
            self._file.close()
        self._file = None
        self._writer = None

    def on_epoch_end(self, trainer, row=None):
        if self.filename is None:
            return
        if self._writer is None:
            self._open(row.epoch)
        self._writer.writerow(row.formatted(self.include_timing))
        self._file.flush()

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Collection of synchronous signals.

Based on the blinker package. Training and evaluation publish their progress
with these signals; reports subscribe to them.
"""

from blinker import Namespace


_signals = Namespace()

# runner events
run_start = _signals.signal('run-start')
run_end = _signals.signal('run-end')
run_error = _signals.signal('run-error')

# training events
epoch_end = _signals.signal('epoch-end')
update_rejected = _signals.signal('update-rejected')
checkpoint_saved = _signals.signal('checkpoint-saved')

# results
eval_result = _signals.signal('eval-result')
bench_result = _signals.signal('bench-result')

# informational
report_comment = _signals.signal('report-comment')

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

# python3

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""JSON codec for checkpoint state and replay records.

Pre-instantiates an encoder and decoder with options common to the whole
package. The encoder also understands numpy scalars and arrays, enums, and
the domain value types, which are written as plain JSON structures so any
other JSON reader can consume them.

Replay files are line-delimited: one JSON record per line.
"""

__all__ = ['Encoder', 'Decoder', 'decode', 'encode', 'dump', 'dumps', 'load',
           'loads', 'from_file', 'write_records', 'read_records']

import json
import enum
import dataclasses

import numpy as np


class Encoder(json.JSONEncoder):
    """Encodes Python objects into JSON, including numpy values and
    dataclass instances.
    """

    def __init__(self, **kwargs):
        kwargs.setdefault("ensure_ascii", False)
        kwargs.setdefault("sort_keys", True)
        super().__init__(**kwargs)

    def default(self, o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, enum.Enum):
            return o.name
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            return {f.name: getattr(o, f.name) for f in dataclasses.fields(o)}
        return super().default(o)


class Decoder(json.JSONDecoder):
    pass


_decoder = Decoder()
_encoder = Encoder()
_line_encoder = Encoder(separators=(",", ":"))


def decode(data):
    return _decoder.decode(data)


def encode(data):
    return _encoder.encode(data)


def from_file(filename):
    """Read JSON from a file.

    Args:
        filename: (str) path the JSON file to read.
    """
    with open(filename, "r", encoding="utf8") as fo:
        return _decoder.decode(fo.read())


def write_records(fo, records):
    """Write an iterable of records, one compact JSON object per line."""
    for rec in records:
        fo.write(_line_encoder.encode(rec))
        fo.write("\n")


def read_records(fo):
    """Yield records from a line-delimited JSON stream, skipping blank lines."""
    for line in fo:
        line = line.strip()
        if line:
            yield _decoder.decode(line)


# Compatibility functions.

def dump(obj, fp):
    for chunk in _encoder.iterencode(obj):
        fp.write(chunk)


def dumps(obj):
    return _encoder.encode(obj)


def load(fp):
    return loads(fp.read())


def loads(s):
    return _decoder.decode(s)

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

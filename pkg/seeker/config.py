# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

r"""Configuration object and factory function.

Based on the confuse YAML configuration package.

Config files are merged together from various sources. The default values are
embedded here in the file config_default.yaml. Users may override, or set
additional values, by placing a "config.yaml" file in the user configuration
directory (`~/.config/seeker/` on Linux and MacOS). An experiment file given
on the command line, then command line overrides, take precedence over both.

Mappings are merged key by key, except `game.schema`, which is always taken
whole from the highest priority source that defines it.
"""

import os
import hashlib
from copy import deepcopy
from collections import ChainMap

import confuse
import yaml

from .core.exceptions import ConfigNotFoundError, ConfigValueError


_CONFIG = None  # singleton instance.

# Keys that do not change the outcome of a run, left out of the config hash.
_VOLATILE_KEYS = ("flags", "report", "resultsdir", "outdir", "config_sha256", "comment",
                  "metrics", "eval", "bench")


class Config(ChainMap):
    """Top-level configuration object.

    A Singleton configuration object.
    A subclass of :py:class:`collections.ChainMap`, it allows chaining other configurations later.
    """

    def __init__(self, *maps):
        self.__dict__["maps"] = list(maps) or [{}]

    def __getattr__(self, name):
        try:
            return self.__getitem__(name)
        except KeyError:
            raise AttributeError(
                "Config: No attribute or key {!r}".format(name)) from None

    def __setattr__(self, name, val):
        self.__setitem__(name, val)

    def __delattr__(self, name):
        self.__delitem__(name)

    def __getitem__(self, key):
        if isinstance(key, str) and "." in key:
            head, rest = key.split(".", 1)
            return super().__getitem__(head)[rest]
        return super().__getitem__(key)

    # Behaves like defaultdict, returning empty ConfigDict by default.
    def __missing__(self, key):
        value = ConfigDict()
        self.__setitem__(key, value)
        return value


class ConfigDict(dict):
    """Configuration Dictionary.

    Provides both attribute style and normal mapping style syntax to access
    mapping values.

    Also features "reaching into" sub-containers using a dot-delimited syntax
    for the key:

        >>> cf = config.get_config()
        >>> cf.rl.alpha
        0.01
        >>> cf["rl.alpha"]
        0.01
    """

    def __init__(self, *args, **kwargs):
        self.__dict__["_depth"] = kwargs.pop("_depth", 0)
        dict.__init__(self, *args, **kwargs)

    def __repr__(self):
        return "{}({})".format(self.__class__.__name__, dict.__repr__(self))

    def __setitem__(self, name, value):
        d, name = self._get_subtree(name)
        return dict.__setitem__(d, name, value)

    def __getitem__(self, name):
        d, name = self._get_subtree(name)
        return dict.__getitem__(d, name)

    def __delitem__(self, name):
        d, name = self._get_subtree(name)
        return dict.__delitem__(d, name)

    def _get_subtree(self, name):
        d = self
        depth = self.__dict__["_depth"]
        parts = name.split(".")
        for part in parts[:-1]:
            depth += 1
            d = d.setdefault(part, self.__class__(_depth=depth))
        return d, parts[-1]

    __setattr__ = __setitem__
    __delattr__ = __delitem__

    def __getattr__(self, name):
        try:
            return self.__getitem__(name)
        except KeyError:
            raise AttributeError("ConfigDict: No attribute or key {!r}".format(name)) from None

    def copy(self):
        return self.__class__(self)

    __copy__ = copy

    # Deep copies get regular dictionaries, not new ConfigDict
    def __deepcopy__(self, memo):
        new = dict()
        for key, value in self.items():
            new[key] = deepcopy(value, memo)
        return new


def _to_configdict(mapping, depth=0):
    cd = ConfigDict(_depth=depth)
    for key, value in mapping.items():
        if isinstance(value, dict):
            value = _to_configdict(value, depth + 1)
        dict.__setitem__(cd, key, value)
    return cd


def nest(flat):
    """Expand dotted keys, {"rl.alpha": 1} -> {"rl": {"alpha": 1}}."""
    out = {}
    for key, value in (flat or {}).items():
        parts = str(key).split(".")
        d = out
        for part in parts[:-1]:
            d = d.setdefault(part, {})
        if isinstance(value, dict):
            value = nest(value)
        d[parts[-1]] = value
    return out


def read_file(filename):
    """Read a YAML experiment file into a plain dictionary."""
    if not os.path.isfile(filename):
        raise ConfigNotFoundError("Config file {!r} not found.".format(filename))
    try:
        with open(filename, encoding="utf8") as fo:
            data = yaml.safe_load(fo)
    except yaml.YAMLError as err:
        raise ConfigValueError("Config file {!r} is not valid YAML: {}".format(
            filename, err)) from err
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigValueError("Config file {!r} must hold a mapping.".format(filename))
    return nest(data)


def load_config(initdict=None, _filename=None, **kwargs):
    """Build a new configuration, without touching the singleton."""
    sources = []
    if _filename:
        sources.append(read_file(_filename))
    if isinstance(initdict, dict):
        sources.append(nest(initdict))
    if kwargs:
        sources.append(nest(kwargs))
    cf = confuse.Configuration("seeker", __name__)
    for src in sources:
        cf.set(src)
    tree = _to_configdict(cf.flatten())
    for src in sources:
        schema = src.get("game", {}).get("schema")
        if schema is not None:
            tree["game"]["schema"] = schema
    return Config(tree)


def get_config(initdict=None, _filename=None, **kwargs):
    """Get primary configuration.

    Returns a Configuration instance containing configuration parameters. An
    extra dictionary may be merged in with the 'initdict' parameter.  And
    finally, extra options may also be added with keyword parameters.

    There is only one Config object in the program, and this will return it. This is the primary
    interface to obtain it.

    Returns:
        A :class:`Config` instance.
    """
    global _CONFIG
    if _CONFIG is None:
        _CONFIG = load_config(initdict, _filename, **kwargs)
    return _CONFIG


def reset_config():
    """Drop the singleton so the next get_config() reads sources again."""
    global _CONFIG
    _CONFIG = None


def show_config(cf, _path=None, file=None):
    """Print the configuration as a list of paths and the end value.
    """
    path = _path or []
    keys = sorted(cf.keys())
    for key in keys:
        value = cf[key]
        path.append(key)
        if isinstance(value, dict):
            show_config(value, path, file=file)
        else:
            print(".".join(path), "=", repr(value), file=file)
        path.pop(-1)


def as_plain(cf):
    """Plain nested dictionaries, suitable for YAML or JSON dumping."""
    if isinstance(cf, ChainMap):
        cf = dict(cf.items())
    return {k: as_plain(v) if isinstance(v, dict) else deepcopy(v) for k, v in cf.items()}


def config_hash(cf):
    """SHA-256 of the settings that determine a run's outcome."""
    plain = as_plain(cf)
    for key in _VOLATILE_KEYS:
        plain.pop(key, None)
    text = yaml.safe_dump(plain, sort_keys=True, default_flow_style=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()

# vim:ts=4:sw=4:softtabstop=4:smarttab:expandtab

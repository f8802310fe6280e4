#!/usr/bin/env python3
'''
Run Configuration

JSON run descriptions: problem, grid and solver sections plus mode,
output directory and RNG seed.
'''

# Copyright (C) 2026 by the choquard authors
#
# This file is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This file is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this file.  If not, see <http://www.gnu.org/licenses/>.

### Imports ###

import json
import math

from dataclasses import dataclass, field as dataclass_field, fields

from packaging import version

from choquard.common.errors import ConfigError, GridError
from choquard.common.grid import Grid, Params
from choquard.common.solver import DEFAULT_SCHEDULE, SolveConfig, schedule_violations



### Variables ###

# Config format written by this release, and the oldest one still understood
CONFIG_VERSION = '0.1'
LAST_COMPAT_CONFIG_VERSION = '0.1'

MODES = ['groundstate', 'nodal', 'continuation', 'levels', 'validate', 'convolve-bench']

DEFAULT_SEED = 20260101



### Classes ###

@dataclass
class ProblemConfig:
    dim: int = 3
    alpha: float = 2.0
    p: float = 2.0
    p_schedule: list = None
    p_values: list = None


@dataclass
class GridConfig:
    points_per_axis: int = 64
    box_length: float = 20.0
    auto_box: bool = False


@dataclass
class RunConfig:
    '''
    Complete description of one batch run
    '''
    mode: str = 'groundstate'
    problem: ProblemConfig = dataclass_field(default_factory=ProblemConfig)
    grid: GridConfig = dataclass_field(default_factory=GridConfig)
    solver: SolveConfig = dataclass_field(default_factory=SolveConfig)
    output_dir: str = 'choquard-out'
    seed: int = DEFAULT_SEED
    field: str = None
    version: str = CONFIG_VERSION

    def params(self, p=None):
        problem = self.problem
        return Params(problem.dim, problem.alpha, problem.p if p is None else p)

    def make_grid(self):
        return Grid(self.problem.dim, self.grid.points_per_axis, self.grid.box_length)

    @property
    def schedule(self):
        return self.problem.p_schedule if self.problem.p_schedule is not None else list(DEFAULT_SCHEDULE)

    @property
    def p_values(self):
        return self.problem.p_values if self.problem.p_values is not None else [self.problem.p]

    def violations(self):
        '''
        Every problem with this config, as human readable messages
        '''
        problems = []
        if self.mode not in MODES:
            problems.append("mode must be one of {0}, not {1!r}".format(", ".join(MODES), self.mode))

        try:
            self.make_grid()
        except GridError as err:
            problems.append(str(err))

        base = self.params()
        if self.mode in ('groundstate', 'nodal', 'validate'):
            problems.extend(base.violations())
        elif self.mode == 'continuation':
            problems.extend(schedule_violations(self.schedule))
            for p in self.schedule + [2.0]:
                problems.extend(base.at(p).violations())
        elif self.mode == 'levels':
            if not self.p_values:
                problems.append("levels mode needs a non-empty p_values list")
            for p in self.p_values:
                problems.extend(base.at(p).violations())
        elif not 0 < base.alpha < base.dim:
            # convolve-bench only needs a valid Riesz order
            problems.append("alpha must lie in (0, N) = (0, {0}), not {1}".format(base.dim, base.alpha))

        # p < 2 nodal runs take the exploratory derivative-free route
        if self.mode == 'nodal' and base.p == 2:
            problems.append("nodal mode needs p > 2 (or p < 2, exploratory), got p = 2; use continuation")
        if self.mode == 'groundstate' and base.p < 2:
            problems.append("groundstate mode needs p >= 2, got p = {0}".format(base.p))
        if self.mode == 'levels' and self.p_values and min(self.p_values) < 2:
            problems.append("levels mode needs every p >= 2, got {0}".format(self.p_values))
        if self.mode == 'validate' and not self.field:
            problems.append("validate mode needs a field (CHQF path)")

        problems.extend(self.solver.violations())
        return problems

    def validate(self):
        '''
        Raises ConfigError listing every violation
        '''
        problems = self.violations()
        if problems:
            raise ConfigError(problems)
        return self

    def to_dict(self):
        '''
        Same JSON shape load_config reads
        '''
        return {
            'version': self.version,
            'mode': self.mode,
            'problem': section_dict(self.problem),
            'grid': section_dict(self.grid),
            'solver': section_dict(self.solver),
            'output_dir': self.output_dir,
            'seed': self.seed,
            'field': self.field,
        }

    def dumps(self):
        return json.dumps(self.to_dict(), indent=4, sort_keys=True) + "\n"



### Functions ###

def section_dict(section):
    return {f.name: getattr(section, f.name) for f in fields(section)}


def check_value(name, value, kind, optional=False):
    '''
    Type check of one config value

    Integral floats are accepted where an int is expected, ints where a float is.

    @return: (value, problem), problem is None when the value is usable
    '''
    if value is None:
        if optional:
            return None, None
        return None, "{0} must be set, not null".format(name)

    if kind is bool:
        if isinstance(value, bool):
            return value, None
        return None, "{0} must be true or false, not {1!r}".format(name, value)

    if kind is str:
        if isinstance(value, str):
            return value, None
        return None, "{0} must be a string, not {1!r}".format(name, value)

    if kind in (int, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            return None, "{0} must be a finite number, not {1!r}".format(name, value)
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                return None, "{0} must be an integer, not {1!r}".format(name, value)
            return int(value), None
        return float(value), None

    if kind is list:
        if not isinstance(value, list):
            return None, "{0} must be a list of numbers, not {1!r}".format(name, value)
        numbers = []
        for index, item in enumerate(value):
            number, problem = check_value("{0}[{1}]".format(name, index), item, float)
            if problem is not None:
                return None, problem
            numbers.append(number)
        return numbers, None

    return value, None


def build_section(cls, data, name):
    '''
    Dataclass section from a JSON object, unknown keys and mistyped values are an error
    '''
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError("section {0!r} must be a JSON object".format(name))
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(["unknown key {0}.{1}".format(name, key) for key in unknown])

    values = {}
    problems = []
    for key, value in data.items():
        declared = known[key]
        value, problem = check_value(
            "{0}.{1}".format(name, key), value, declared.type, optional=declared.default is None
        )
        if problem is None:
            values[key] = value
        else:
            problems.append(problem)
    if problems:
        raise ConfigError(problems)
    return cls(**values)


def check_version(config_version):
    '''
    Rejects configs older than the last compatible format
    '''
    try:
        parsed = version.parse(str(config_version))
    except version.InvalidVersion:
        raise ConfigError("unreadable config version {0!r}".format(config_version))
    if parsed < version.parse(LAST_COMPAT_CONFIG_VERSION):
        raise ConfigError("config version {0} is older than the last compatible version {1}".format(
            config_version, LAST_COMPAT_CONFIG_VERSION
        ))


def from_dict(data):
    '''
    RunConfig from a parsed JSON object, not validated
    '''
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {'version', 'mode', 'problem', 'grid', 'solver', 'output_dir', 'seed', 'field'}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(["unknown key {0}".format(key) for key in unknown])

    check_version(data.get('version', CONFIG_VERSION))

    top = {}
    problems = []
    for key, kind, optional in (('mode', str, False), ('output_dir', str, False), ('seed', int, False),
                                ('field', str, True)):
        if key in data:
            top[key], problem = check_value(key, data[key], kind, optional)
            if problem is not None:
                problems.append(problem)
    if problems:
        raise ConfigError(problems)

    try:
        config = RunConfig(
            mode=top.get('mode', 'groundstate'),
            problem=build_section(ProblemConfig, data.get('problem'), 'problem'),
            grid=build_section(GridConfig, data.get('grid'), 'grid'),
            solver=build_section(SolveConfig, data.get('solver'), 'solver'),
            output_dir=top.get('output_dir', 'choquard-out'),
            seed=top.get('seed', DEFAULT_SEED),
            field=top.get('field'),
            version=str(data.get('version', CONFIG_VERSION)),
        )
    except TypeError as err:
        raise ConfigError("malformed config: {0}".format(err))
    return config


def read_config(path):
    '''
    Reads a JSON run config without validating it, so overrides can be applied first

    @return: RunConfig
    '''
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except OSError as err:
        raise ConfigError("cannot read config {0}: {1}".format(path, err.strerror))
    except json.JSONDecodeError as err:
        raise ConfigError("config {0} is not valid JSON: {1}".format(path, err))
    return from_dict(data)


def load_config(path):
    '''
    Reads and validates a JSON run config

    @param path: Path to the JSON file

    @return: RunConfig
    '''
    return read_config(path).validate()

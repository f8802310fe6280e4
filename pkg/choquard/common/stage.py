#!/usr/bin/env python3
'''
Choquard Pipeline Stage Definitions
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

from collections import OrderedDict

import math
import multiprocessing
import re
import sys
import time

import numpy as np

import choquard.common.config as config
import choquard.common.diagnostics as diagnostics
import choquard.common.riesz as riesz
import choquard.common.solver as solver

import choquard.emitters.emitters as emitters

from choquard.common.errors import ChoquardError, ConfigError, SolverError
from choquard.common.file import FieldFile
from choquard.common.functional import Evaluation
from choquard.common.grid import Field


### Decorators ###

# Print Decorator Variables
ERROR = '\033[5;1;31mERROR\033[0m:'
WARNING = '\033[5;1;33mWARNING\033[0m:'

ansi_escape = re.compile(r'\x1b[^m]*m')


### Variables ###

# Exit codes
EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_CONFIG = 3

# Random fields per convolve-bench run, and sampled targets on grids too large for a full direct sum
BENCH_FIELDS = 20
BENCH_TARGETS = 256


### Classes ###

class AnsiStripper(object):
    '''
    Stream wrapper dropping ANSI escape sequences (--color never)
    '''

    def __init__(self, stream):
        self.stream = stream

    def write(self, text):
        return self.stream.write(ansi_escape.sub('', text))

    def flush(self):
        self.stream.flush()

    def __getattr__(self, name):
        return getattr(self.stream, name)


class ControlStage(object):
    '''
    Top-level Stage

    Controls the order in which each stage is processed
    '''

    def __init__(self):
        '''
        Initialize stage objects and control variables
        '''

        # Initialized in process order
        # NOTE: Only unique classes in this list, otherwise stage() will get confused
        self.stages = [
            ConfigurationStage(self),
            GridStage(self),
            SolveStage(self),
            DiagnosticsStage(self),
            OutputStage(self),
        ]

        self.git_rev = None
        self.git_changes = None
        self.version = None
        self.short_version = None

        # First ChoquardError raised by a stage, serialized into the report
        self.error = None

    def stage(self, context_str):
        '''
        Returns the stage object of the associated string name of the class

        @param context_str: String name of the class of the stage e.g. ConfigurationStage
        '''
        return [stage for stage in self.stages if type(stage).__name__ == context_str][0]

    def command_line_args(self, args):
        '''
        Capture commmand line arguments for each processing stage

        @param args: Name space of processed arguments
        '''
        for stage in self.stages:
            stage.command_line_args(args)

    def command_line_flags(self, parser):
        '''
        Prepare group parser for each processing stage

        @param parser: argparse setup object
        '''
        for stage in self.stages:
            stage.command_line_flags(parser)

    def exit_code(self):
        '''
        0 on success, 2 for solver failures, 3 for configuration and domain errors
        '''
        if self.error is None:
            return EXIT_OK
        if isinstance(self.error, SolverError):
            return EXIT_SOLVER
        return EXIT_CONFIG

    def process(self):
        '''
        Main processing section

        Each stage must complete before the next one begins. On a failure the
        remaining stages are skipped, except the output stage, which still
        writes the report (with the error) once a configuration is known.

        @return: Exit code
        '''
        stdout = sys.stdout
        try:
            for stage in self.stages:
                try:
                    stage.process()
                except ChoquardError as err:
                    stage._status = 'Incomplete'
                    self.error = err
                    print("{0} {1}: {2}".format(ERROR, type(err).__name__, err))
                    if isinstance(err, ConfigError):
                        for violation in err.violations[1:]:
                            print("      {0}".format(violation))
                    break

                # Make sure stage has successfully completed
                if stage.status() != 'Completed':
                    print("{0} Invalid stage status '{1}' for '{2}'.".format(
                        ERROR,
                        stage.status(),
                        stage.__class__.__name__,
                    ))
                    if self.error is None:
                        self.error = SolverError("stage {0} did not complete".format(type(stage).__name__))
                    break

            # Still emit the failure report
            output = self.stage('OutputStage')
            if self.error is not None and output.status() == 'Queued':
                if self.stage('ConfigurationStage').status() == 'Completed':
                    output.process()
        finally:
            sys.stdout = stdout

        return self.exit_code()


class Stage(object):
    '''
    Base Stage Class
    '''

    def __init__(self, control):
        '''
        Stage initialization

        @param control: ControlStage object, used to access data from other stages
        '''
        self.control = control
        self._status = 'Queued'

    def command_line_args(self, args):
        '''
        Group parser for command line arguments

        @param args: Name space of processed arguments
        '''

    def command_line_flags(self, parser):
        '''
        Group parser for command line options

        @param parser: argparse setup object
        '''

    def process(self):
        '''
        Main procesing section
        '''
        self._status = 'Running'

        print("{0} '{1}' '{2}' has not been implemented yet"
            .format(
                WARNING,
                self.process.__name__,
                type(self).__name__
            )
        )

        self._status = 'Completed'

    def status(self):
        '''
        Returns the current status of the Stage

        Values:
        Queued     - Not yet run
        Running    - Currently running
        Completed  - Successfully completed
        Incomplete - Unsuccessfully completed
        '''
        return self._status

    def run_config(self):
        return self.control.stage('ConfigurationStage').config


class ConfigurationStage(Stage):
    '''
    Configuration Stage

    * Loads the JSON run configuration
    * Applies command line overrides, then validates
    '''

    # Command line flag -> (section, key)
    overrides = OrderedDict([
        ('dim', ('problem', 'dim')),
        ('alpha', ('problem', 'alpha')),
        ('p', ('problem', 'p')),
        ('p_schedule', ('problem', 'p_schedule')),
        ('p_values', ('problem', 'p_values')),
        ('M', ('grid', 'points_per_axis')),
        ('L', ('grid', 'box_length')),
        ('output_dir', (None, 'output_dir')),
        ('field', (None, 'field')),
        ('seed', (None, 'seed')),
    ])

    def __init__(self, control):
        '''
        Initialize configuration variables
        '''
        super().__init__(control)

        self.mode = None
        self.config_path = None
        self.values = {}
        self.auto_box = False
        self.solver_debug = False
        self.color = "auto"
        self.jobs = multiprocessing.cpu_count()
        self.config = None

        # Build list of emitters
        self.emitters = emitters.Emitters(control)
        self.emitter = self.emitters.emitter_default()

    def command_line_args(self, args):
        '''
        Group parser for command line arguments

        @param args: Name space of processed arguments
        '''
        self.mode = args.mode
        self.config_path = args.config
        self.values = {name: getattr(args, name) for name in self.overrides}
        self.auto_box = args.auto_box
        self.solver_debug = args.solver_debug
        self.jobs = args.jobs
        if args.emitter:
            self.emitter = args.emitter

        if args.color == 'auto':
            self.color = sys.stdout.isatty()
        else:
            self.color = args.color == 'always'

    def command_line_flags(self, parser):
        '''
        Group parser for command line options

        @param parser: argparse setup object
        '''
        # Create new option group
        group = parser.add_argument_group('\033[1mRun Configuration\033[0m')

        # Positional Arguments
        group.add_argument('mode', type=str, nargs='?', default=None, choices=config.MODES,
            help="Pipeline to run, overrides the config mode.\n"
            "\033[1mOptions\033[0m: {0}".format(", ".join(config.MODES))
        )

        # Optional Arguments
        group.add_argument('--config', type=str, default=None,
            help="JSON run configuration (problem, grid, solver sections).\n"
        )
        group.add_argument('--dim', type=int, default=None, help="Dimension N.\n")
        group.add_argument('--alpha', type=float, default=None, help="Riesz order alpha, 0 < alpha < N.\n")
        group.add_argument('--p', type=float, default=None, help="Exponent p.\n")
        group.add_argument('--p-schedule', type=float, nargs='+', default=None,
            help="Decreasing continuation schedule.\n"
            "\033[1mDefault\033[0m: {0}".format(" ".join(str(p) for p in solver.DEFAULT_SCHEDULE))
        )
        group.add_argument('--p-values', type=float, nargs='+', default=None,
            help="Exponents for the levels pipeline.\n"
        )
        group.add_argument('--M', type=int, default=None, help="Points per axis (power of two, >= 8).\n")
        group.add_argument('--L', type=float, default=None, help="Box length.\n")
        group.add_argument('--auto-box', action='store_true', default=False,
            help="Double L until the groundstate tail mass outside |x| > L/4 is below {0:.0e}.\n".format(
                solver.TAIL_MASS_TOL
            )
        )
        group.add_argument('--output-dir', type=str, default=None, help="Directory for reports, tables and fields.\n")
        group.add_argument('--field', type=str, default=None, help="CHQF field to validate.\n")
        group.add_argument('--seed', type=int, default=None,
            help="RNG seed for randomized checks.\n"
            "\033[1mDefault\033[0m: {0}".format(config.DEFAULT_SEED)
        )
        group.add_argument('--emitter', type=str, action='append', default=[],
            choices=self.emitters.emitter_list(),
            help="Output writer, pass multiple times to use more than one.\n"
            "\033[1mDefault\033[0m: {0}\n"
            "\033[1mOptions\033[0m: {1}".format(", ".join(self.emitter), self.emitters.emitter_list())
        )
        group.add_argument('--color', type=str, default=self.color, choices=['auto', 'always', 'never'],
            help="Specify debug colorizer mode.\n"
            "\033[1mDefault\033[0m: {0}\n"
            "\033[1mOptions\033[0m: auto, always, never (auto attempts to detect support)".format(self.color)
        )
        group.add_argument('--jobs', type=int, default=self.jobs,
            help="Specify max number of threads to use (levels pipeline).\n"
            "\033[1mDefault\033[0m: {0}".format(self.jobs)
        )
        group.add_argument('--solver-debug', action='store_true', default=False,
            help="Print per-iteration solver progress.\n"
        )

    def process(self):
        '''
        Builds and validates the RunConfig
        '''
        self._status = 'Running'

        if not self.color:
            sys.stdout = AnsiStripper(sys.stdout)

        run = config.read_config(self.config_path) if self.config_path else config.RunConfig()
        if self.mode is not None:
            run.mode = self.mode
        for name, (section, key) in self.overrides.items():
            value = self.values.get(name)
            if value is None:
                continue
            setattr(run if section is None else getattr(run, section), key, value)
        if self.auto_box:
            run.grid.auto_box = True
        if self.solver_debug:
            run.solver.debug = True

        self.config = run.validate()
        print("choquard {0}: N={1} alpha={2} p={3}".format(
            run.mode, run.problem.dim, run.problem.alpha, run.problem.p
        ))

        self._status = 'Completed'


class GridStage(Stage):
    '''
    Grid Stage

    * Builds the grid, or reads it from the field to validate
    * Optionally grows the box (auto_box)
    '''

    def __init__(self, control):
        super().__init__(control)

        self.grid = None
        self.field = None
        self.groundstate = None

    def box_exponent(self, run):
        '''
        Exponent whose groundstate sizes the box
        '''
        if run.mode == 'continuation':
            return 2.0
        if run.mode == 'levels':
            return min(run.p_values)
        return run.problem.p

    def process(self):
        self._status = 'Running'
        run = self.run_config()

        if run.mode == 'validate':
            field_file = FieldFile(run.field)
            if not field_file.check():
                raise ConfigError("field file {0} does not exist".format(run.field))
            self.field = field_file.read()
            self.grid = self.field.grid
            if self.grid.dim != run.problem.dim:
                raise ConfigError("field {0} is {1}-dimensional, config says dim = {2}".format(
                    run.field, self.grid.dim, run.problem.dim
                ))
        else:
            self.grid = run.make_grid()
            if run.grid.auto_box and run.mode not in ('convolve-bench',) and self.box_exponent(run) >= 2:
                self.grid, self.groundstate = solver.auto_box(
                    run.params(self.box_exponent(run)), run.solver, self.grid
                )

        print("grid: N={0} M={1} L={2} h={3:.6g}".format(
            self.grid.dim, self.grid.points_per_axis, self.grid.box_length, self.grid.spacing
        ))
        self._status = 'Completed'


class SolveStage(Stage):
    '''
    Solve Stage

    * Runs the pipeline selected by the mode
    * Collects reports, tables and fields for the emitters
    '''

    def __init__(self, control):
        super().__init__(control)

        self.reports = []
        self.tables = OrderedDict()
        self.fields = OrderedDict()
        self.bench = None
        self.exploratory = None

    def groundstate(self, params, run, grid):
        '''
        Groundstate at params, reusing the auto_box solve when it matches
        '''
        cached = self.control.stage('GridStage').groundstate
        if cached is not None and cached.p == params.p:
            return cached
        return solver.groundstate_solve(params, run.solver, grid)

    def add_field(self, name, report):
        self.fields[name] = (report.field, report)

    def process(self):
        self._status = 'Running'
        run = self.run_config()
        grid = self.control.stage('GridStage').grid
        params = run.params()
        start = time.perf_counter()

        if run.mode == 'groundstate':
            report = self.groundstate(params, run, grid)
            self.reports = [report]
            self.add_field('groundstate', report)

        elif run.mode == 'nodal' and params.p < 2:
            self.exploratory = diagnostics.exploratory_nodal_level(params, grid)
            print("nodal p={0} (exploratory): c0 ~ {1!r}, nodal bound {2!r}".format(
                params.p, self.exploratory.c0_estimate, self.exploratory.nodal_upper_bound
            ))

        elif run.mode == 'nodal':
            groundstate = self.groundstate(params, run, grid)
            nodal = solver.nodal_solve(params, run.solver, grid, groundstate=groundstate)
            self.reports = [groundstate, nodal]
            self.add_field('nodal', nodal)

        elif run.mode == 'continuation':
            self.reports = solver.continuation_run(params, run.solver, grid, run.schedule)
            self.tables['continuation'] = (solver.CONTINUATION_COLUMNS, solver.continuation_rows(self.reports))
            for report in self.reports:
                self.add_field('continuation_p{0}'.format(report.p), report)

        elif run.mode == 'levels':
            jobs = self.control.stage('ConfigurationStage').jobs
            self.reports = solver.level_curve(params, run.solver, grid, run.p_values, jobs=jobs)
            self.tables['levels'] = (solver.LEVEL_COLUMNS, solver.level_table(self.reports))

        elif run.mode == 'convolve-bench':
            self.bench = convolve_bench(grid, params.alpha, np.random.default_rng(run.seed))

        print("{0} finished in {1:.2f} s".format(run.mode, time.perf_counter() - start))
        self._status = 'Completed'


class DiagnosticsStage(Stage):
    '''
    Diagnostics Stage

    * Level inequalities, Pohozaev and HLS checks of the computed fields
    * Recomputes everything for a stored field (validate)
    '''

    def __init__(self, control):
        super().__init__(control)

        self.diagnostics = None
        self.certificate = None
        self.energy = None

    def validate(self, run, field):
        '''
        Diagnostics of a stored field, no reference groundstate
        '''
        params = run.params()
        evaluation = Evaluation(field, params)
        self.energy = evaluation.breakdown()
        self.diagnostics = diagnostics.DiagnosticsReport(
            pohozaev_residual=diagnostics.pohozaev_residual(field, params, evaluation),
            hls_ratio=diagnostics.hls_ratio(field, params),
            sign_change=diagnostics.sign_change(field, run.solver.degenerate_tol),
            level_gap=float('nan'),
            nodal_norm_floor=diagnostics.nodal_norm_floor(field),
            exploratory=params.p < 2,
        )
        if params.p >= 2:
            self.certificate = diagnostics.critical_point_certificate(field, params, seed=run.seed)

    def process(self):
        self._status = 'Running'
        run = self.run_config()
        solve = self.control.stage('SolveStage')
        tol = run.solver.degenerate_tol

        if run.mode == 'validate':
            self.validate(run, self.control.stage('GridStage').field)

        elif run.mode == 'nodal' and solve.exploratory is not None:
            level = solve.exploratory
            self.diagnostics = diagnostics.level_diagnostics(
                level.field, run.params(), level.c0_estimate, level.nodal_upper_bound, tol
            )

        elif run.mode == 'nodal':
            groundstate, nodal = solve.reports
            self.diagnostics = diagnostics.verify_level_inequalities(groundstate, nodal, tol)
            self.certificate = diagnostics.critical_point_certificate(nodal.field, nodal.params(), seed=run.seed)

        elif run.mode == 'continuation':
            final = solve.reports[-1]
            self.diagnostics = diagnostics.level_diagnostics(
                final.field, final.params(), final.groundstate_level, final.level, tol
            )
            self.certificate = diagnostics.critical_point_certificate(final.field, final.params(), seed=run.seed)

        elif run.mode == 'groundstate':
            report = solve.reports[0]
            self.certificate = diagnostics.critical_point_certificate(report.field, report.params(), seed=run.seed)

        if self.diagnostics is not None:
            print("diagnostics: {0}".format(", ".join(
                "{0}={1}".format(key, value) for key, value in self.diagnostics.json().items()
            )))
            if not self.diagnostics.passed and not math.isnan(self.diagnostics.level_gap):
                label = "exploratory " if self.diagnostics.exploratory else ""
                print("{0} {1}level inequality check failed".format(WARNING, label))
        if self.certificate is not None:
            print("critical point certificate: {0:.3e}".format(self.certificate))

        self._status = 'Completed'


class OutputStage(Stage):
    '''
    Output Stage

    * Writes fields, tables and the JSON report through the selected emitters
    '''

    # Fields first, the report records their paths
    order = ['field', 'table', 'report', 'none']

    def command_line_args(self, args):
        '''
        Group parser for command line arguments

        @param args: Name space of processed arguments
        '''
        self.control.stage('ConfigurationStage').emitters.command_line_args(args)

    def command_line_flags(self, parser):
        '''
        Group parser for command line options

        @param parser: argparse setup object
        '''
        # Create options groups for each of the Emitters
        self.control.stage('ConfigurationStage').emitters.command_line_flags(parser)

    def process(self):
        self._status = 'Running'
        configuration = self.control.stage('ConfigurationStage')

        selected = [name for name in self.order if name in configuration.emitter]
        if self.control.error is not None:
            selected = [name for name in selected if name == 'report']

        for name in selected:
            # Get Emitter object
            emitter = configuration.emitters.emitter(name)

            # Call Emitter
            emitter.process()

            # Generate Outputs using Emitter
            emitter.output()

            # Mark whole stage as incomplete if any emitter is not finished
            if not emitter.check():
                self._status = 'Incomplete'
                return

        self._status = 'Completed'



### Functions ###

def convolve_bench(grid, alpha, rng, count=BENCH_FIELDS):
    '''
    FFT convolution against the direct-sum oracle on random fields

    Grids above the direct-sum limit are compared on BENCH_TARGETS sampled nodes.

    @return: dict with max relative errors and timings
    '''
    kernel = riesz.build_kernel(grid, alpha)
    full = grid.size <= riesz.DIRECT_SUM_LIMIT
    targets = np.arange(grid.size) if full else np.sort(rng.choice(grid.size, BENCH_TARGETS, replace=False))

    fft_time = direct_time = 0.0
    oracle_error = periodic_error = 0.0
    for _ in range(count):
        v = Field(grid, rng.standard_normal(grid.shape))

        start = time.perf_counter()
        fast = riesz.convolve(kernel, v)
        fft_time += time.perf_counter() - start

        start = time.perf_counter()
        exact = riesz.direct_sum_at(kernel, v, targets)
        direct_time += time.perf_counter() - start

        sampled = fast.flat()[targets]
        oracle_error = max(oracle_error, float(np.max(np.abs(sampled - exact)) / np.max(np.abs(exact))))

        # Periodic variant drops the mean, compare mean-free parts
        periodic = riesz.convolve_periodic(grid, alpha, v).flat()
        centered = fast.flat() - np.mean(fast.flat())
        periodic_error = max(periodic_error, float(
            np.max(np.abs(periodic - np.mean(periodic) - centered)) / np.max(np.abs(centered))
        ))

    bench = OrderedDict([
        ('dim', grid.dim),
        ('points_per_axis', grid.points_per_axis),
        ('alpha', alpha),
        ('fields', count),
        ('targets', len(targets)),
        ('oracle_max_relative_error', oracle_error),
        ('periodic_discrepancy', periodic_error),
        ('fft_seconds', fft_time),
        ('direct_seconds', direct_time),
    ])
    print("convolve-bench N={0} M={1}: FFT vs direct max relative error {2:.3e} ({3} targets)".format(
        grid.dim, grid.points_per_axis, oracle_error, len(targets)
    ))
    print("convolve-bench: periodic multiplier discrepancy {0:.3e}".format(periodic_error))
    print("convolve-bench: FFT {0:.3f} s, direct {1:.3f} s for {2} fields".format(fft_time, direct_time, count))
    return bench

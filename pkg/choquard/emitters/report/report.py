#!/usr/bin/env python3
'''
Report Emitter, JSON run report and config provenance
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

import os

from collections import OrderedDict

from choquard.common.emitter import Emitter, JsonEmitter
from choquard.common.file import atomic_write



### Classes ###

class Report(Emitter, JsonEmitter):
    '''
    Writes <output_dir>/<mode>.json and <output_dir>/config.json
    '''

    def __init__(self, control):
        '''
        Emitter initialization

        @param control: ControlStage object, used to access data from other stages
        '''
        Emitter.__init__(self, control)
        JsonEmitter.__init__(self)

        self.report_debug = False

    def command_line_args(self, args):
        self.report_debug = args.report_debug

    def command_line_flags(self, parser):
        '''
        Group parser for command line options

        @param parser: argparse setup object
        '''
        group = parser.add_argument_group('\033[1mReport Emitter Configuration\033[0m')

        group.add_argument('--report-debug', action='store_true', default=self.report_debug,
            help="Show the report path once written.\n",
        )

    def process(self):
        '''
        Gather results of every stage into json_dict
        '''
        run = self.control.stage('ConfigurationStage').config
        grid = self.control.stage('GridStage').grid
        solve = self.control.stage('SolveStage')
        checks = self.control.stage('DiagnosticsStage')
        error = self.control.error

        self.json_dict = OrderedDict([
            ('version', self.control.version),
            ('git_revision', self.control.git_rev),
            ('mode', run.mode),
            ('status', 'failed' if error is not None else 'ok'),
            ('params', run.params().json()),
            ('grid', grid.json() if grid is not None else None),
            ('reports', [report.json() for report in solve.reports]),
            ('energy', checks.energy),
            ('diagnostics', checks.diagnostics),
            ('certificate', checks.certificate),
            ('exploratory', solve.exploratory),
            ('bench', solve.bench),
            ('error', error.json() if error is not None else None),
        ])

    def output(self):
        '''
        Write the report, then the effective config
        '''
        run = self.control.stage('ConfigurationStage').config
        output_dir = run.output_dir
        path = os.path.join(output_dir, "{0}.json".format(run.mode))

        self.generate_json(path)
        atomic_write(os.path.join(output_dir, 'config.json'), run.dumps(), 'w')

        if self.report_debug:
            print("Report written to {0}".format(path))

#!/usr/bin/env python3
'''
Field Emitter, converged fields as CHQF files
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

from choquard.common.emitter import Emitter
from choquard.common.file import FieldFile



### Classes ###

class FieldWriter(Emitter):
    '''
    Writes every solved field to <output_dir>/<name>.chqf
    '''

    def __init__(self, control):
        '''
        Emitter initialization

        @param control: ControlStage object, used to access data from other stages
        '''
        Emitter.__init__(self, control)

        self.field_debug = False
        self.queue = []

    def command_line_args(self, args):
        self.field_debug = args.field_debug

    def command_line_flags(self, parser):
        '''
        Group parser for command line options

        @param parser: argparse setup object
        '''
        group = parser.add_argument_group('\033[1mField Emitter Configuration\033[0m')

        group.add_argument('--field-debug', action='store_true', default=self.field_debug,
            help="Show each field file as it is written.\n",
        )

    def process(self):
        '''
        Queue (path, field, report) for every solved field
        '''
        output_dir = self.output_dir()
        self.queue = [
            (os.path.join(output_dir, "{0}.chqf".format(name)), field, report)
            for name, (field, report) in self.control.stage('SolveStage').fields.items()
        ]

    def output(self):
        '''
        Write the fields, recording each path in its report
        '''
        for path, field, report in self.queue:
            FieldFile(path).write(field, debug=self.field_debug)
            if report is not None:
                report.field_path = path

#!/usr/bin/env python3
'''
Table Emitter, CSV files for continuation and level curves
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

import csv
import io

from choquard.common.emitter import Emitter, FileEmitter



### Functions ###

def format_value(value):
    '''
    repr for floats so identical runs give identical bytes
    '''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(columns, rows):
    '''
    CSV document with a header row, '\\n' line endings
    '''
    output = io.StringIO()
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[column]) for column in columns])
    return output.getvalue()



### Classes ###

class Table(Emitter, FileEmitter):
    '''
    Writes <output_dir>/<table>.csv for every table the run produced
    '''

    def __init__(self, control):
        '''
        Emitter initialization

        @param control: ControlStage object, used to access data from other stages
        '''
        Emitter.__init__(self, control)
        FileEmitter.__init__(self)

    def process(self):
        self.output_files = [
            ("{0}.csv".format(name), csv_text(columns, rows))
            for name, (columns, rows) in self.control.stage('SolveStage').tables.items()
        ]

    def output(self):
        self.generate(self.output_dir())

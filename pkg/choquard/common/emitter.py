#!/usr/bin/env python3
'''
Choquard Emitter Base Classes
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
import os

from collections import OrderedDict

import numpy as np

from choquard.common.file import atomic_write



### Decorators ###

# Print Decorator Variables
WARNING = '\033[5;1;33mWARNING\033[0m:'



### Classes ###

class ReportEncoder(json.JSONEncoder):
    '''
    Objects with a json() method, numpy scalars and arrays
    '''

    def default(self, o):
        if hasattr(o, 'json'):
            return o.json()
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        return super().default(o)


class Emitter(object):
    '''
    Choquard Emitter Base Class

    NOTE: Emitter should do as little as possible in the __init__ function.
    '''

    def __init__(self, control):
        '''
        Emitter initialization

        @param control: ControlStage object, used to access data from other stages
        '''
        self.control = control

        # Signal erroring due to an issue
        self.error_exit = False

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
        Emitter Processing
        '''
        print("{0} '{1}' '{2}' has not been implemented yet"
            .format(
                WARNING,
                self.process.__name__,
                type(self).__name__
            )
        )

    def output(self):
        '''
        Final Stage of Emitter

        Generate desired outputs
        '''
        print("{0} '{1}' '{2}' has not been implemented yet"
            .format(
                WARNING,
                self.output.__name__,
                type(self).__name__
            )
        )

    def check(self):
        '''
        Determines whether or not we've successfully emitted.
        '''
        return not self.error_exit

    def output_dir(self):
        return self.control.stage('ConfigurationStage').config.output_dir


class FileEmitter(object):
    '''
    Base class for any emitter that wants to output a file

    Every file is written atomically (temp file, then rename).
    '''

    def __init__(self):
        '''
        FileEmitter Initialization
        '''
        self.output_files = []

    def generate(self, output_path):
        '''
        Write every queued (name, contents) pair into output_path

        @param output_path: Output directory
        '''
        for name, contents in self.output_files:
            mode = 'wb' if isinstance(contents, bytes) else 'w'
            atomic_write(os.path.join(output_path, name), contents, mode)


class JsonEmitter(object):
    '''
    Base class for emitters writing one JSON document
    '''

    def __init__(self):
        '''
        JsonEmitter Initialization
        '''
        self.json_dict = OrderedDict()

    def generate_json(self, output_path):
        '''
        Generates the output json file using self.json_dict

        NaN and inf are written as null.
        '''
        output = json.dumps(finite(self.json_dict), indent=4, cls=ReportEncoder) + "\n"
        atomic_write(output_path, output, 'w')



### Functions ###

def finite(value):
    '''
    Replaces non-finite floats by None, recursively
    '''
    if hasattr(value, 'json'):
        value = value.json()
    if isinstance(value, dict):
        return OrderedDict((key, finite(item)) for key, item in value.items())
    if isinstance(value, (list, tuple)):
        return [finite(item) for item in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value

#!/usr/bin/env python3
'''
Choquard Field File Container (CHQF)
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
import struct
import tempfile

import numpy as np

from choquard.common.errors import GridError
from choquard.common.grid import Field, Grid



### Decorators ###

# Print Decorator Variables
ERROR = '\033[5;1;31mERROR\033[0m:'



### Variables ###

MAGIC = b'CHQF'
FORMAT_VERSION = 1

# Magic plus version and N bytes, then one (uint32 M, float64 L) entry per axis
HEADER_SIZE = 6
AXIS_SIZE = struct.calcsize('<Id')



### Functions ###

def atomic_write(path, data, mode='wb'):
    '''
    Writes data next to path, then renames over it

    @param path: Destination path
    @param data: bytes (mode 'wb') or str (mode 'w')
    '''
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        with os.fdopen(fd, mode) as f:
            f.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def encode_field(field):
    '''
    CHQF encoding: magic, version byte, N byte, per axis (uint32 M, float64 L),
    then M^N little-endian float64 values in row-major order
    '''
    grid = field.grid
    header = MAGIC + struct.pack('<BB', FORMAT_VERSION, grid.dim)
    for _ in range(grid.dim):
        header += struct.pack('<Id', grid.points_per_axis, grid.box_length)
    return header + field.flat().astype('<f8').tobytes()


def decode_field(data):
    '''
    Inverse of encode_field

    @return: Field
    '''
    if data[:4] != MAGIC:
        raise GridError("Not a CHQF field (bad magic {0!r})".format(data[:4]))
    if len(data) < HEADER_SIZE:
        raise GridError("Truncated CHQF header, {0} bytes".format(len(data)))
    version, dim = struct.unpack_from('<BB', data, 4)
    if version != FORMAT_VERSION:
        raise GridError("Unsupported CHQF version {0}".format(version))

    offset = HEADER_SIZE + dim * AXIS_SIZE
    if len(data) < offset:
        raise GridError("Truncated CHQF axis table, {0} bytes for N = {1}".format(len(data), dim))
    axes = [struct.unpack_from('<Id', data, HEADER_SIZE + axis * AXIS_SIZE) for axis in range(dim)]

    # Grid only models cubic boxes
    if len(set(axes)) != 1:
        raise GridError("CHQF axes differ {0}, only cubic grids are supported".format(axes))
    points, length = axes[0]
    grid = Grid(dim, points, length)

    payload = len(data) - offset
    if payload != 8 * grid.size:
        raise GridError("CHQF payload has {0} bytes, expected {1} for {2} values".format(
            payload, 8 * grid.size, grid.size
        ))
    values = np.frombuffer(data, dtype='<f8', offset=offset)
    return Field(grid, values.astype(np.float64))



### Classes ###

class FieldFile:
    '''
    Container for a field stored on disk
    '''

    def __init__(self, path):
        '''
        @param path: Path to the .chqf file, if relative, relative to the execution environment
        '''
        self.path = path
        self.field = None

    def __repr__(self):
        return "FieldFile({0}, {1})".format(self.path, self.field)

    def check(self):
        '''
        Make sure that the file exists at the initialized path
        '''
        exists = os.path.isfile(self.path)

        # Display error message, will exit later
        if not exists:
            print("{0} {1} does not exist...".format(ERROR, self.path))

        return exists

    def read(self):
        '''
        Read the field into memory

        @return: Field
        '''
        with open(self.path, 'rb') as f:
            self.field = decode_field(f.read())
        return self.field

    def write(self, field, debug=False):
        '''
        Atomically writes field to the path
        '''
        if debug:
            print("Writing to {0}".format(self.path))
        self.field = field
        atomic_write(self.path, encode_field(field))

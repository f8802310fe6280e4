#!/usr/bin/env python3
'''
Choquard Solver Exceptions
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

### Classes ###

class ChoquardError(Exception):
    '''
    Base class for every error raised by the choquard library
    '''

    def json(self):
        '''
        JSON representation, stored in the report of a failed run
        '''
        return {
            'type': type(self).__name__,
            'message': str(self),
        }


class ConfigError(ChoquardError):
    '''
    Unreadable or invalid run configuration

    @param violations: List of human readable violation messages
    '''

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GridError(ChoquardError):
    '''
    Invalid grid, or fields living on different grids
    '''


class DomainError(ChoquardError):
    '''
    Operation called outside of its mathematical domain
    '''


class SolverError(ChoquardError):
    '''
    Base class of solver failures (exit code 2)
    '''


class ConvergenceError(SolverError):
    '''
    Iteration cap reached before the residual tolerance
    '''

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual

    def json(self):
        output = super().json()
        output['iterations'] = self.iterations
        output['residual'] = self.residual
        return output


class DegeneracyError(SolverError):
    '''
    A sign part vanished, or the whole field collapsed
    '''


class FiberingError(SolverError):
    '''
    Fibering maximiser on the boundary of the quadrant or not converged
    '''

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point

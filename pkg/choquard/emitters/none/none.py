#!/usr/bin/env python3
'''
Drop Emitter, writes nothing
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

from choquard.common.emitter import Emitter



### Classes ###

class Drop(Emitter):
    '''
    Doesn't emit at all, console output only
    '''

    def output(self):
        '''
        Nothing to do
        '''

    def process(self):
        '''
        Nothing to do, just dropping all the results
        '''

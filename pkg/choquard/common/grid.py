#!/usr/bin/env python3
'''
Choquard Grid, Field and Parameter Containers
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

import math

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

from choquard.common.errors import DomainError, GridError



### Classes ###

@dataclass(frozen=True)
class Grid:
    '''
    Uniform periodic box [-L/2, L/2)^N with M cell-centered samples per axis

    Hashable, so kernels and spectral symbols can be cached per grid.
    '''
    dim: int
    points_per_axis: int
    box_length: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise GridError("Grid dimension must be 1, 2 or 3, not {0}".format(self.dim))
        m = self.points_per_axis
        if m < 8 or m & (m - 1) != 0:
            raise GridError("points_per_axis must be a power of two >= 8, not {0}".format(m))
        if not self.box_length > 0 or not math.isfinite(self.box_length):
            raise GridError("box_length must be positive, not {0}".format(self.box_length))

    @property
    def spacing(self):
        return self.box_length / self.points_per_axis

    @property
    def cell_volume(self):
        return self.spacing ** self.dim

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dim

    @property
    def size(self):
        return self.points_per_axis ** self.dim

    def axis(self):
        '''
        Cell-center coordinates along one axis
        '''
        h = self.spacing
        return -self.box_length / 2 + h * (np.arange(self.points_per_axis) + 0.5)

    def mesh(self):
        '''
        Coordinate arrays, one per axis, with ij indexing
        '''
        return np.meshgrid(*([self.axis()] * self.dim), indexing='ij')

    def radius(self):
        '''
        |x| at every cell center
        '''
        return np.sqrt(sum(x ** 2 for x in self.mesh()))

    def json(self):
        return {
            'dim': self.dim,
            'points_per_axis': self.points_per_axis,
            'box_length': self.box_length,
        }


class Field:
    '''
    Real grid function, value at index i is u(x_i) at the cell center x_i
    '''

    def __init__(self, grid, values):
        '''
        @param grid:   Grid the field lives on
        @param values: Array of M^N reals, flat (row-major) or already shaped
        '''
        values = np.asarray(values, dtype=np.float64)
        if values.size != grid.size:
            raise GridError("Field has {0} values, grid {1} needs {2}".format(
                values.size, grid, grid.size
            ))
        self.grid = grid
        self.values = values.reshape(grid.shape)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid, function):
        '''
        Samples function(*coordinates) at every cell center
        '''
        return cls(grid, function(*grid.mesh()))

    def flat(self):
        return self.values.reshape(-1)

    def copy(self):
        return Field(self.grid, self.values.copy())

    def check(self, other):
        '''
        Raises GridError if other lives on a different grid
        '''
        if other.grid != self.grid:
            raise GridError("Grid mismatch: {0} vs {1}".format(self.grid, other.grid))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))

    def abs(self):
        return Field(self.grid, np.abs(self.values))

    def power(self, p):
        '''
        |u|^p
        '''
        return Field(self.grid, np.abs(self.values) ** p)

    def roll(self, cells, axis=0):
        '''
        Periodic translation by an integer number of cells
        '''
        return Field(self.grid, np.roll(self.values, cells, axis=axis))

    def reflect(self):
        '''
        u(-x), reflection through the box center (exact on the cell-centered grid)
        '''
        return Field(self.grid, np.flip(self.values))

    def __add__(self, other):
        self.check(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other):
        self.check(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            self.check(other)
            return Field(self.grid, self.values * other.values)
        return Field(self.grid, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __repr__(self):
        return "Field({0}, max|u|={1:.6g})".format(self.grid, float(np.max(np.abs(self.values))))


@dataclass
class Params:
    '''
    Problem parameters: dimension N, Riesz order alpha and exponent p
    '''
    dim: int
    alpha: float
    p: float

    def window(self):
        '''
        Admissible exponent window ((N+a)/N, (N+a)/(N-2)_+), upper end may be inf
        '''
        lower = (self.dim + self.alpha) / self.dim
        upper = math.inf if self.dim <= 2 else (self.dim + self.alpha) / (self.dim - 2)
        return lower, upper

    def window_str(self):
        lower, upper = self.window()
        return "(N+alpha)/N < p < (N+alpha)/(N-2)_+, i.e. {0:.6g} < p < {1:.6g} for N={2}, alpha={3}".format(
            lower, upper, self.dim, self.alpha
        )

    def violations(self):
        '''
        Returns a list of human readable invariant violations (empty when valid)
        '''
        problems = []
        if self.dim not in (1, 2, 3):
            problems.append("dim must be 1, 2 or 3, not {0}".format(self.dim))
            return problems
        if not 0 < self.alpha < self.dim:
            problems.append("alpha must lie in (0, N) = (0, {0}), not {1}".format(self.dim, self.alpha))
            return problems
        lower, upper = self.window()
        if not lower < self.p < upper:
            problems.append("p = {0} is outside the admissible window {1}".format(self.p, self.window_str()))
        if self.p == 2 and not self.alpha > max(self.dim - 4, 0):
            problems.append("p = 2 requires alpha in ((N-4)_+, N) = ({0}, {1}), not {2}".format(
                max(self.dim - 4, 0), self.dim, self.alpha
            ))
        return problems

    def check(self):
        '''
        Raises DomainError listing every violation
        '''
        problems = self.violations()
        if problems:
            raise DomainError("; ".join(problems))
        return self

    def at(self, p):
        '''
        Same (N, alpha) at another exponent
        '''
        return Params(self.dim, self.alpha, p)

    @property
    def nehari_factor(self):
        '''
        1/2 - 1/(2p), action = factor * ||u||^2 on the Nehari manifold
        '''
        return 0.5 - 0.5 / self.p

    def json(self):
        return {'dim': self.dim, 'alpha': self.alpha, 'p': self.p}



### Functions ###

@lru_cache(maxsize=32)
def wavenumber_squared(grid):
    '''
    |k|^2 = |2 pi xi / L|^2 on the FFT index layout of the grid
    '''
    k = 2 * np.pi * scipy.fft.fftfreq(grid.points_per_axis, d=grid.spacing)
    mesh = np.meshgrid(*([k] * grid.dim), indexing='ij')
    k2 = sum(kk ** 2 for kk in mesh)
    k2.setflags(write=False)
    return k2


def helmholtz_symbol(grid):
    '''
    Fourier symbol 1 + |k|^2 of -Laplace + 1
    '''
    return 1.0 + wavenumber_squared(grid)


def apply_helmholtz(u):
    '''
    (-Laplace + 1) u with the spectral Laplacian
    '''
    hat = scipy.fft.fftn(u.values)
    return Field(u.grid, scipy.fft.ifftn(helmholtz_symbol(u.grid) * hat).real)


def solve_helmholtz(f):
    '''
    (-Laplace + 1)^-1 f by spectral division
    '''
    hat = scipy.fft.fftn(f.values)
    return Field(f.grid, scipy.fft.ifftn(hat / helmholtz_symbol(f.grid)).real)


def integrate(f):
    '''
    Rectangle rule h^N * sum_i f(x_i)
    '''
    return float(f.grid.cell_volume * np.sum(f.values))


def l2_inner(u, v):
    u.check(v)
    return float(u.grid.cell_volume * np.vdot(u.values, v.values))


def h1_inner(u, v):
    '''
    int grad u . grad v + u v, computed spectrally

    Parseval: sum_x u v = M^-N sum_k u_hat conj(v_hat), times h^N for the integral.
    '''
    u.check(v)
    grid = u.grid
    u_hat = scipy.fft.fftn(u.values)
    v_hat = u_hat if v is u else scipy.fft.fftn(v.values)
    total = np.sum(helmholtz_symbol(grid) * (u_hat * np.conj(v_hat)).real)
    return float(grid.cell_volume * total / grid.size)


def h1_norm(u):
    return math.sqrt(max(h1_inner(u, u), 0.0))


def split_signs(u):
    '''
    (u+, u-) with u+ = max(u, 0), u- = max(-u, 0) and u = u+ - u-
    '''
    return (
        Field(u.grid, np.maximum(u.values, 0.0)),
        Field(u.grid, np.maximum(-u.values, 0.0)),
    )


def gaussian(grid, width=1.0, center=None):
    '''
    exp(-|x - center|^2 / width^2)
    '''
    if center is None:
        center = (0.0,) * grid.dim
    mesh = grid.mesh()
    r2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
    return Field(grid, np.exp(-r2 / width ** 2))

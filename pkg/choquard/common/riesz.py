#!/usr/bin/env python3
'''
Riesz Potential Convolution

Free-space (zero-padded) convolution with I_alpha(x) = A_alpha / |x|^(N - alpha)
on the truncated grid, plus the direct-sum oracle and a periodic multiplier variant.
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

from functools import lru_cache

import numpy as np
import scipy.fft

from scipy.special import gamma

from choquard.common.errors import DomainError, GridError
from choquard.common.grid import Field, wavenumber_squared



### Variables ###

# Direct sums are quadratic in the number of nodes
DIRECT_SUM_LIMIT = 2 ** 16



### Functions ###

def riesz_constant(dim, alpha):
    '''
    A_alpha = Gamma((N - alpha)/2) / (Gamma(alpha/2) pi^(N/2) 2^alpha)
    '''
    return gamma((dim - alpha) / 2) / (gamma(alpha / 2) * math.pi ** (dim / 2) * 2 ** alpha)


def sphere_area(dim):
    '''
    Area of the unit sphere S^(N-1)
    '''
    return 2 * math.pi ** (dim / 2) / gamma(dim / 2)


def ball_volume(dim):
    return math.pi ** (dim / 2) / gamma(dim / 2 + 1)


def origin_cell_value(dim, alpha, spacing):
    '''
    Mean of I_alpha over the ball B_r with |B_r| = h^N

    int_{B_r} A |x|^(alpha - N) dx = A sigma_(N-1) r^alpha / alpha
    '''
    cell = spacing ** dim
    r = (cell / ball_volume(dim)) ** (1.0 / dim)
    return riesz_constant(dim, alpha) * sphere_area(dim) * r ** alpha / alpha / cell



### Classes ###

class RieszKernel:
    '''
    Sampled Riesz kernel on the doubled (zero-padding) grid

    samples are stored in FFT order: offset index j in [0, 2M) stands for
    (j if j < M else j - 2M) cells. The origin holds origin_cell_value.
    '''

    def __init__(self, grid, alpha):
        '''
        @param grid:  Grid of the fields to convolve
        @param alpha: Riesz order, 0 < alpha < N
        '''
        if not 0 < alpha < grid.dim:
            raise DomainError("Riesz order alpha must lie in (0, {0}), not {1}".format(grid.dim, alpha))

        self.grid = grid
        self.alpha = alpha
        self.constant = riesz_constant(grid.dim, alpha)
        self.origin_cell_value = origin_cell_value(grid.dim, alpha, grid.spacing)

        m = grid.points_per_axis
        offsets = np.fft.fftfreq(2 * m, d=1.0 / (2 * m)) * grid.spacing
        mesh = np.meshgrid(*([offsets] * grid.dim), indexing='ij')
        distance = np.sqrt(sum(d ** 2 for d in mesh))

        # Silence the 0 division at the origin, overwritten just below
        with np.errstate(divide='ignore'):
            samples = self.constant / distance ** (grid.dim - alpha)
        samples[(0,) * grid.dim] = self.origin_cell_value
        samples.setflags(write=False)
        self.samples = samples

        self.padded_shape = samples.shape
        self.transform = scipy.fft.rfftn(samples)

    def __repr__(self):
        return "RieszKernel(N={0}, alpha={1}, M={2}, L={3})".format(
            self.grid.dim, self.alpha, self.grid.points_per_axis, self.grid.box_length
        )

    def check(self, v):
        if v.grid != self.grid:
            raise GridError("Grid mismatch: kernel {0} vs field {1}".format(self.grid, v.grid))

    def restrict(self, padded):
        '''
        Original-grid block of a doubled-grid array
        '''
        m = self.grid.points_per_axis
        return padded[(slice(0, m),) * self.grid.dim]


@lru_cache(maxsize=16)
def build_kernel(grid, alpha):
    '''
    Kernel built once per (grid, alpha) pair
    '''
    return RieszKernel(grid, alpha)


def convolve(kernel, v):
    '''
    Linear (non-circular) convolution h^N sum_y K(x - y) v(y)

    Zero padding to the doubled grid keeps the offsets x - y in (-M, M),
    so the circular FFT product never wraps.
    '''
    kernel.check(v)
    v_hat = scipy.fft.rfftn(v.values, s=kernel.padded_shape)
    padded = scipy.fft.irfftn(kernel.transform * v_hat, s=kernel.padded_shape)
    return Field(v.grid, kernel.grid.cell_volume * kernel.restrict(padded))


def direct_sum_at(kernel, v, targets):
    '''
    h^N sum_y K(x - y) v(y) at the given flat target indices only

    @return: numpy array, one value per target
    '''
    kernel.check(v)
    grid = v.grid
    m = grid.points_per_axis
    index = np.array(np.unravel_index(np.arange(grid.size), grid.shape))
    values = v.flat()
    out = np.empty(len(targets))
    for position, target in enumerate(targets):
        offsets = (index[:, target:target + 1] - index) % (2 * m)
        out[position] = np.dot(kernel.samples[tuple(offsets)], values)
    return grid.cell_volume * out


def convolve_direct(kernel, v):
    '''
    Same sum as convolve, by an explicit loop over target nodes
    '''
    grid = v.grid
    if grid.size > DIRECT_SUM_LIMIT:
        raise GridError("Direct sum needs M^N <= {0}, grid has {1} nodes".format(DIRECT_SUM_LIMIT, grid.size))
    return Field(grid, direct_sum_at(kernel, v, range(grid.size)))


def convolve_periodic(grid, alpha, v):
    '''
    Periodic spectral multiplier |k|^-alpha with the zero mode set to 0

    Approximation only: includes periodic images and drops the mean.
    Used to cross-validate the free-space convolution.
    '''
    if not 0 < alpha < grid.dim:
        raise DomainError("Riesz order alpha must lie in (0, {0}), not {1}".format(grid.dim, alpha))
    if v.grid != grid:
        raise GridError("Grid mismatch: {0} vs {1}".format(grid, v.grid))
    k2 = wavenumber_squared(grid)
    with np.errstate(divide='ignore'):
        multiplier = k2 ** (-alpha / 2)
    multiplier[(0,) * grid.dim] = 0.0
    return Field(grid, scipy.fft.ifftn(multiplier * scipy.fft.fftn(v.values)).real)

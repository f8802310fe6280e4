#!/usr/bin/env python3
'''
Choquard Action Functional

A_p(u) = 1/2 ||u||^2_H1 - 1/(2p) int (I_alpha * |u|^p) |u|^p
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

from dataclasses import asdict, dataclass

import numpy as np

from choquard.common.errors import DomainError
from choquard.common.grid import (
    Field,
    apply_helmholtz,
    h1_inner,
    integrate,
    solve_helmholtz,
    split_signs,
)
from choquard.common.riesz import build_kernel, convolve



### Classes ###

@dataclass
class EnergyBreakdown:
    '''
    Energies and constraint residuals of a single field
    '''
    h1_norm_sq: float
    interaction: float
    action: float
    nehari_residual: float
    nodal_residual_plus: float
    nodal_residual_minus: float

    def json(self):
        return asdict(self)


class Evaluation:
    '''
    Everything the solvers need about one field, from a single convolution

    potential = I_alpha * |u|^p is computed once; rescaled evaluations
    (see scaled) reuse it since I_alpha * |t u|^p = |t|^p I_alpha * |u|^p.
    '''

    def __init__(self, u, params, potential=None, h1_norm_sq=None):
        '''
        @param u:          Field
        @param params:     Params (alpha, p)
        @param potential:  Precomputed I_alpha * |u|^p, if known
        @param h1_norm_sq: Precomputed ||u||^2_H1, if known
        '''
        self.u = u
        self.params = params
        self.density = u.power(params.p)
        if potential is None:
            potential = convolve(build_kernel(u.grid, params.alpha), self.density)
        self.potential = potential
        self.h1_norm_sq = h1_inner(u, u) if h1_norm_sq is None else h1_norm_sq
        self.interaction = integrate(self.potential * self.density)

    def scaled(self, t):
        '''
        Evaluation of t u without a new convolution
        '''
        p = self.params.p
        return Evaluation(
            self.u * t,
            self.params,
            potential=self.potential * abs(t) ** p,
            h1_norm_sq=self.h1_norm_sq * t ** 2,
        )

    @property
    def action(self):
        return 0.5 * self.h1_norm_sq - self.interaction / (2 * self.params.p)

    @property
    def nehari_residual(self):
        return self.h1_norm_sq - self.interaction

    def nonlinearity(self):
        '''
        (I_alpha * |u|^p) |u|^(p-2) u, evaluated as sign(u) |u|^(p-1)
        '''
        u = self.u.values
        return Field(self.u.grid, self.potential.values * np.sign(u) * np.abs(u) ** (self.params.p - 1))

    def residual(self):
        '''
        R(u) = (-Laplace + 1) u - (I_alpha * |u|^p) |u|^(p-2) u
        '''
        require_differentiable(self.params)
        return apply_helmholtz(self.u) - self.nonlinearity()

    def sobolev_gradient(self):
        '''
        (-Laplace + 1)^-1 R(u) = u - (-Laplace + 1)^-1 N(u)
        '''
        require_differentiable(self.params)
        return self.u - solve_helmholtz(self.nonlinearity())

    def nodal_interaction(self):
        '''
        (int (I * |u|^p) |u+|^p, int (I * |u|^p) |u-|^p)
        '''
        plus, minus = split_signs(self.u)
        p = self.params.p
        return (
            integrate(self.potential * plus.power(p)),
            integrate(self.potential * minus.power(p)),
        )

    def nodal_residuals(self):
        '''
        (<A'(u), u+>, <A'(u), -u->), weak-form pairings; they sum to <A'(u), u>
        '''
        plus, minus = split_signs(self.u)
        interaction_plus, interaction_minus = self.nodal_interaction()
        return (
            h1_inner(self.u, plus) - interaction_plus,
            -h1_inner(self.u, minus) - interaction_minus,
        )

    def breakdown(self):
        residual_plus, residual_minus = self.nodal_residuals()
        return EnergyBreakdown(
            h1_norm_sq=self.h1_norm_sq,
            interaction=self.interaction,
            action=self.action,
            nehari_residual=self.nehari_residual,
            nodal_residual_plus=residual_plus,
            nodal_residual_minus=residual_minus,
        )



### Functions ###

def require_differentiable(params):
    '''
    |u|^(p-2) u is not Lipschitz at 0 for p < 2
    '''
    if params.p < 2:
        raise DomainError("gradient needs p >= 2, got p = {0}; p < 2 is derivative-free only".format(params.p))


def action(u, params):
    return Evaluation(u, params).action


def interaction(u, params):
    '''
    D(u) = int (I_alpha * |u|^p) |u|^p
    '''
    return Evaluation(u, params).interaction


def interaction_cross(f, g, params):
    '''
    D(f, g) = int (I_alpha * |f|^p) |g|^p
    '''
    f.check(g)
    potential = convolve(build_kernel(f.grid, params.alpha), f.power(params.p))
    return integrate(potential * g.power(params.p))


def gradient(u, params):
    '''
    Grid representative R(u) of A_p'(u): <A_p'(u), phi> = integrate(R(u) phi)
    '''
    return Evaluation(u, params).residual()


def sobolev_gradient(u, params):
    '''
    H1 Riesz representative g: h1_inner(g, phi) = integrate(R(u) phi)
    '''
    return Evaluation(u, params).sobolev_gradient()


def energy_breakdown(u, params):
    return Evaluation(u, params).breakdown()


def quotient_from(h1_norm_sq, interaction_value, params):
    '''
    (1/2 - 1/(2p)) ||u||^(2p/(p-1)) / D(u)^(1/(p-1))
    '''
    p = params.p
    if not h1_norm_sq > 0:
        raise DomainError("groundstate quotient of the zero field")
    if not interaction_value > 0:
        raise DomainError("groundstate quotient needs D(u) > 0, got {0}".format(interaction_value))
    return params.nehari_factor * h1_norm_sq ** (p / (p - 1)) / interaction_value ** (1 / (p - 1))


def groundstate_quotient(u, params):
    '''
    Scale invariant quotient whose infimum is c_0,p
    '''
    evaluation = Evaluation(u, params)
    return quotient_from(evaluation.h1_norm_sq, evaluation.interaction, params)

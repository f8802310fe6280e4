#!/usr/bin/env python3
'''
Solution Diagnostics

Residual checks that tie computed fields back to the Pohozaev identity,
the Hardy-Littlewood-Sobolev bound and the critical level inequalities.
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

from dataclasses import asdict, dataclass, field as dataclass_field

import numpy as np
import scipy.optimize

from choquard.common.errors import DomainError, FiberingError
from choquard.common.functional import Evaluation, quotient_from
from choquard.common.grid import Field, Grid, h1_norm, integrate, l2_inner, split_signs
from choquard.common.nehari import FiberingMap



### Decorators ###

# Print Decorator Variables
WARNING = '\033[5;1;33mWARNING\033[0m:'



### Variables ###

# Slack for the exploratory p < 2 comparison c_nod,p ~ c_0,p
EXPLORATORY_SLACK = 1e-2



### Classes ###

@dataclass
class DiagnosticsReport:
    '''
    Aggregated checks for a groundstate / nodal pair at the same (N, alpha, p)
    '''
    pohozaev_residual: float
    hls_ratio: float
    sign_change: bool
    level_gap: float
    nodal_norm_floor: float
    lower_gap: float = float('nan')
    passed: bool = False
    exploratory: bool = False

    def json(self):
        return asdict(self)


@dataclass
class ExploratoryLevel:
    '''
    Derivative-free estimates of c_0,p and of a nodal upper bound, p < 2
    '''
    p: float
    c0_estimate: float
    nodal_upper_bound: float
    relative_excess: float
    profile_core: float
    profile_decay: float
    t_plus: float
    t_minus: float
    field: Field = dataclass_field(default=None, repr=False)

    def json(self):
        return {key: value for key, value in asdict(self).items() if key != 'field'}



### Functions ###

def pohozaev_residual(u, params, evaluation=None):
    '''
    Relative defect of (N-2)/2 int|grad u|^2 + N/2 int u^2 = (N+alpha)/(2p) D(u)
    '''
    if evaluation is None:
        evaluation = Evaluation(u, params)
    mass = l2_inner(u, u)
    if mass == 0:
        raise DomainError("Pohozaev residual of the zero field")
    dim = params.dim
    kinetic = evaluation.h1_norm_sq - mass
    lhs = (dim - 2) / 2 * kinetic + dim / 2 * mass
    rhs = (dim + params.alpha) / (2 * params.p) * evaluation.interaction
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def hls_ratio(v, params):
    '''
    D(v) / (int |v|^(2Np/(N+alpha)))^((N+alpha)/N)
    '''
    params.check()
    dim = params.dim
    exponent = 2 * dim * params.p / (dim + params.alpha)
    denominator = integrate(v.power(exponent)) ** ((dim + params.alpha) / dim)
    if denominator == 0:
        raise DomainError("HLS ratio of the zero field")
    return Evaluation(v, params).interaction / denominator


def gaussian_mixture(grid, rng, components=3):
    '''
    Random sum of Gaussian bumps inside the central half of the box
    '''
    mesh = grid.mesh()
    values = np.zeros(grid.shape)
    for _ in range(components):
        center = rng.uniform(-grid.box_length / 4, grid.box_length / 4, size=grid.dim)
        width = rng.uniform(2 * grid.spacing, grid.box_length / 8)
        amplitude = rng.uniform(0.5, 2.0)
        r2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
        values += amplitude * np.exp(-r2 / width ** 2)
    return Field(grid, values)


def hls_sweep(grid, params, count=100, seed=0):
    '''
    hls_ratio over count random Gaussian mixtures

    @return: numpy array of ratios
    '''
    rng = np.random.default_rng(seed)
    return np.array([hls_ratio(gaussian_mixture(grid, rng), params) for _ in range(count)])


def sign_change(u, degenerate_tol):
    '''
    True when both ||u+|| and ||u-|| exceed degenerate_tol * ||u|| in H1
    '''
    return nodal_norm_floor(u) > degenerate_tol


def nodal_norm_floor(u):
    '''
    min(||u+||, ||u-||) / ||u|| in H1
    '''
    norm = h1_norm(u)
    if norm == 0:
        return 0.0
    plus, minus = split_signs(u)
    return min(h1_norm(plus), h1_norm(minus)) / norm


def symmetry(u):
    '''
    Parity defects through the box center and the centroid separation of |u+|^2, |u-|^2
    '''
    norm = math.sqrt(l2_inner(u, u))
    reflected = u.reflect()
    odd = math.sqrt(l2_inner(u + reflected, u + reflected)) / norm
    even = math.sqrt(l2_inner(u - reflected, u - reflected)) / norm

    separation = float('nan')
    plus, minus = split_signs(u)
    mass_plus = plus * plus
    mass_minus = minus * minus
    total_plus = integrate(mass_plus)
    total_minus = integrate(mass_minus)
    if total_plus > 0 and total_minus > 0:
        centroid_plus = np.array([integrate(mass_plus * Field(u.grid, x)) for x in u.grid.mesh()]) / total_plus
        centroid_minus = np.array([integrate(mass_minus * Field(u.grid, x)) for x in u.grid.mesh()]) / total_minus
        separation = float(np.linalg.norm(centroid_plus - centroid_minus))

    return {
        'odd_defect': odd,
        'even_defect': even,
        'separation': separation,
    }


def critical_point_certificate(u, params, count=10, seed=0):
    '''
    max over random phi of |<A'(u), phi>| / (||u|| ||phi||), H1 norms

    @return: float, at most the relative Sobolev-gradient residual
    '''
    rng = np.random.default_rng(seed)
    residual = Evaluation(u, params).residual()
    norm = h1_norm(u)
    worst = 0.0
    for _ in range(count):
        phi = gaussian_mixture(u.grid, rng)
        worst = max(worst, abs(l2_inner(residual, phi)) / (norm * h1_norm(phi)))
    return worst


def verify_level_inequalities(groundstate, nodal, degenerate_tol=1e-6):
    '''
    Checks c_0,p < c_nod,p < 2 c_0,p for a groundstate and a nodal report

    For p < 2 the comparison is exploratory: passes when
    c_nod,p - c_0,p <= EXPLORATORY_SLACK * c_0,p.

    @return: DiagnosticsReport
    '''
    ours = (groundstate.dim, groundstate.p, groundstate.alpha)
    theirs = (nodal.dim, nodal.p, nodal.alpha)
    if ours != theirs:
        raise DomainError("reports at different parameters: (N, p, alpha) = {0} vs {1}".format(ours, theirs))

    return level_diagnostics(nodal.field, nodal.params(), groundstate.level, nodal.level, degenerate_tol)


def level_diagnostics(u, params, c0, c_nod, degenerate_tol=1e-6):
    '''
    DiagnosticsReport of a sign-changing field u at level c_nod against c0
    '''
    level_gap = 2 * c0 - c_nod
    lower_gap = c_nod - c0
    exploratory = params.p < 2

    if exploratory:
        passed = lower_gap <= EXPLORATORY_SLACK * c0
    else:
        passed = level_gap > 0 and lower_gap > 0

    return DiagnosticsReport(
        pohozaev_residual=pohozaev_residual(u, params),
        hls_ratio=hls_ratio(u, params),
        sign_change=sign_change(u, degenerate_tol),
        level_gap=level_gap,
        nodal_norm_floor=nodal_norm_floor(u),
        lower_gap=lower_gap,
        passed=bool(passed),
        exploratory=exploratory,
    )


def radial_profile(grid, core, decay, center=0.0):
    '''
    exp(-sqrt(core^2 + |x - center e1|^2) / decay)
    '''
    mesh = grid.mesh()
    r2 = (mesh[0] - center) ** 2 + sum(x ** 2 for x in mesh[1:])
    return Field(grid, np.exp(-np.sqrt(core ** 2 + r2) / decay))


def exploratory_nodal_level(params, grid, separation=None):
    '''
    Derivative-free p < 2 proxy for c_nod,p = c_0,p

    c_0,p is estimated by minimising the groundstate quotient over the
    radial profile family (Nelder-Mead on log(core), log(decay)). The nodal
    bound is the lowest stationary value of the fibering map for a pair
    of profiles at distance 2 * separation (default L/4 each side).

    @return: ExploratoryLevel
    '''
    params.check()
    if separation is None:
        separation = grid.box_length / 4

    def quotient(log_shape):
        core, decay = np.exp(log_shape)
        evaluation = Evaluation(radial_profile(grid, core, decay), params)
        return quotient_from(evaluation.h1_norm_sq, evaluation.interaction, params)

    result = scipy.optimize.minimize(
        quotient,
        x0=np.log([1.0, 1.0]),
        method='Nelder-Mead',
        options={'xatol': 1e-6, 'fatol': 1e-12, 'maxiter': 400},
    )
    core, decay = np.exp(result.x)
    c0_estimate = float(result.fun)

    pair = (
        radial_profile(grid, core, decay, center=-separation)
        - radial_profile(grid, core, decay, center=separation)
    )
    plus, minus = split_signs(pair)
    fibering = FiberingMap(plus, minus, params)
    t_plus, t_minus = fibering.initial_point()
    starts = [(t_plus, t_minus * 10.0 ** -k) for k in range(0, 16, 3)]
    points = fibering.stationary_points(starts)
    if not points:
        raise FiberingError("no interior stationary point of the fibering map for p = {0}".format(params.p))
    best = points[0]

    excess = (best.value - c0_estimate) / c0_estimate
    if excess > EXPLORATORY_SLACK:
        print("{0} exploratory p = {1}: nodal bound exceeds c_0,p by {2:.3%}".format(WARNING, params.p, excess))

    return ExploratoryLevel(
        p=params.p,
        c0_estimate=c0_estimate,
        nodal_upper_bound=best.value,
        relative_excess=excess,
        profile_core=float(core),
        profile_decay=float(decay),
        t_plus=best.t_plus,
        t_minus=best.t_minus,
        field=fibering.project(best).u,
    )


def refinement_study(params, cfg, resolutions, solve=None):
    '''
    Pohozaev residual of converged groundstates over (M, L) pairs

    Prints the observed order between successive resolutions.

    @param resolutions: List of (points_per_axis, box_length), coarse to fine
    @param solve:       Solver callable (params, cfg, grid) -> SolveReport,
                        defaults to the groundstate solver

    @return: List of (points_per_axis, box_length, pohozaev_residual)
    '''
    if solve is None:
        from choquard.common.solver import groundstate_solve as solve

    rows = []
    for points, length in resolutions:
        report = solve(params, cfg, Grid(params.dim, points, length))
        rows.append((points, length, report.pohozaev_residual))

    for (m0, _, r0), (m1, _, r1) in zip(rows, rows[1:]):
        if r0 > 0 and r1 > 0:
            order = math.log(r0 / r1) / math.log(m1 / m0)
            print("refinement M {0} -> {1}: pohozaev {2:.3e} -> {3:.3e}, observed order {4:.2f}".format(
                m0, m1, r0, r1, order
            ))
        if r1 >= r0:
            print("{0} Pohozaev residual did not decrease from M={1} to M={2}".format(WARNING, m0, m1))
    return rows

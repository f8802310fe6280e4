#!/usr/bin/env python3
'''
Nehari Projections

Scalar rescaling onto the Nehari manifold and the two-parameter fibering
projection onto the Nehari nodal set.
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

from dataclasses import dataclass

import numpy as np

from choquard.common.errors import DomainError, FiberingError
from choquard.common.functional import Evaluation
from choquard.common.grid import h1_inner, integrate
from choquard.common.riesz import build_kernel, convolve



### Variables ###

# Relative size of the nodal residuals at which Newton stops
FIBERING_TOL = 1e-12

# Accepted when Newton stagnates at round-off
FIBERING_ACCEPT_TOL = 1e-10

# Relative size of t+ or t- that counts as a boundary maximiser
BOUNDARY_TOL = 1e-10



### Classes ###

@dataclass
class FiberingPoint:
    '''
    Maximiser (t+, t-) of the fibering map and its value
    '''
    t_plus: float
    t_minus: float
    value: float
    converged: bool
    iterations: int
    residual: float = float('nan')

    def json(self):
        return {
            't_plus': self.t_plus,
            't_minus': self.t_minus,
            'value': self.value,
            'converged': self.converged,
            'iterations': self.iterations,
            'residual': self.residual,
        }


class FiberingMap:
    '''
    E_p(t+, t-) = A_p(t+^(1/p) w+ - t-^(1/p) w-)

    With q = 2/p and s = t^(1/p),
    E = t+^q a+/2 + t-^q a-/2 - (t+ t-)^(q/2) c - (t+^2 d+ + 2 t+ t- dx + t-^2 d-)/(2p)

    a = ||w||^2_H1, dx = D(w+, w-) and c = h1_inner(w+, w-). c vanishes in the
    continuum for disjoint supports; on the grid the spectral pairing leaves a
    small remainder, kept so that E(1, 1) = A_p(w+ - w-) holds exactly.
    '''

    def __init__(self, w_plus, w_minus, params, decoupled=False):
        '''
        @param w_plus:    Nonnegative field
        @param w_minus:   Nonnegative field, support disjoint from w_plus
        @param params:    Params
        @param decoupled: Drop the cross terms dx and c (each part projected alone)
        '''
        w_plus.check(w_minus)
        if np.any(w_plus.values < 0) or np.any(w_minus.values < 0):
            raise DomainError("fibering parts must be nonnegative")
        if np.any((w_plus.values > 0) & (w_minus.values > 0)):
            raise DomainError("fibering parts have overlapping supports")
        if not np.any(w_plus.values > 0) or not np.any(w_minus.values > 0):
            raise DomainError("fibering needs two nonzero parts")

        self.w_plus = w_plus
        self.w_minus = w_minus
        self.params = params
        p = params.p

        kernel = build_kernel(w_plus.grid, params.alpha)
        density_plus = w_plus.power(p)
        density_minus = w_minus.power(p)
        self.potential_plus = convolve(kernel, density_plus)
        self.potential_minus = convolve(kernel, density_minus)

        self.a_plus = h1_inner(w_plus, w_plus)
        self.a_minus = h1_inner(w_minus, w_minus)
        self.d_plus = integrate(self.potential_plus * density_plus)
        self.d_minus = integrate(self.potential_minus * density_minus)
        if decoupled:
            self.c = 0.0
            self.d_cross = 0.0
        else:
            self.c = h1_inner(w_plus, w_minus)
            self.d_cross = integrate(self.potential_plus * density_minus)

    def energy(self, t_plus, t_minus):
        p = self.params.p
        q = 2.0 / p
        return (
            0.5 * t_plus ** q * self.a_plus
            + 0.5 * t_minus ** q * self.a_minus
            - (t_plus * t_minus) ** (q / 2) * self.c
            - (t_plus ** 2 * self.d_plus + 2 * t_plus * t_minus * self.d_cross + t_minus ** 2 * self.d_minus) / (2 * p)
        )

    def gradient(self, t_plus, t_minus):
        p = self.params.p
        q = 2.0 / p
        h = q / 2
        cross = self.c * h * (t_plus * t_minus) ** h
        return np.array([
            h * self.a_plus * t_plus ** (q - 1) - cross / t_plus - (t_plus * self.d_plus + t_minus * self.d_cross) / p,
            h * self.a_minus * t_minus ** (q - 1) - cross / t_minus - (t_minus * self.d_minus + t_plus * self.d_cross) / p,
        ])

    def hessian(self, t_plus, t_minus):
        p = self.params.p
        q = 2.0 / p
        h = q / 2
        cross = self.c * h * (t_plus * t_minus) ** h
        pp = h * (q - 1) * self.a_plus * t_plus ** (q - 2) - (h - 1) * cross / t_plus ** 2 - self.d_plus / p
        mm = h * (q - 1) * self.a_minus * t_minus ** (q - 2) - (h - 1) * cross / t_minus ** 2 - self.d_minus / p
        pm = -h * cross / (t_plus * t_minus) - self.d_cross / p
        return np.array([[pp, pm], [pm, mm]])

    def scaled_residual(self, t_plus, t_minus):
        '''
        Nodal residuals <A'(u), u+-> = p t+- dE/dt+-, each relative to ||u+-||^2_H1
        '''
        grad = self.gradient(t_plus, t_minus)
        p = self.params.p
        norm_plus = t_plus ** (2 / p) * self.a_plus
        norm_minus = t_minus ** (2 / p) * self.a_minus
        return float(p * max(abs(t_plus * grad[0]) / norm_plus, abs(t_minus * grad[1]) / norm_minus))

    def initial_point(self):
        '''
        Decoupled scalar Nehari projections of each part, t = (a/d)^(p/(2p-2))
        '''
        p = self.params.p
        exponent = p / (2 * p - 2)
        return np.array([
            (self.a_plus / self.d_plus) ** exponent,
            (self.a_minus / self.d_minus) ** exponent,
        ])

    def newton(self, start, max_iters):
        '''
        Damped Newton ascent on E in (t+, t-), step halving until E increases

        @return: (t, iterations, residual)
        '''
        t = np.array(start, dtype=np.float64)
        residual = self.scaled_residual(*t)
        iterations = 0
        while iterations < max_iters and residual > FIBERING_TOL:
            grad = self.gradient(*t)
            hess = self.hessian(*t)

            # Levenberg shift keeps the step an ascent direction
            largest = np.max(np.linalg.eigvalsh(hess))
            if largest >= 0:
                hess = hess - (largest + abs(np.trace(hess)) + 1e-300) * np.eye(2)
            step = -np.linalg.solve(hess, grad)

            value = self.energy(*t)
            scale = 1.0
            for _ in range(60):
                trial = t + scale * step
                if np.all(trial > 0) and self.energy(*trial) >= value - 1e-15 * abs(value):
                    break
                scale *= 0.5
            else:
                break

            t = trial
            residual = self.scaled_residual(*t)
            iterations += 1
        return t, iterations, residual

    def newton_log(self, start, max_iters):
        '''
        Damped Newton on t * grad E = 0 in y = log t, step halving until the
        scaled residual decreases. Finds saddles as well as maxima.

        @return: (t, iterations, residual)
        '''
        y = np.log(np.array(start, dtype=np.float64))
        t = np.exp(y)
        residual = self.scaled_residual(*t)
        iterations = 0
        while iterations < max_iters and residual > FIBERING_TOL:
            grad = self.gradient(*t)
            residual_vector = t * grad
            jacobian = np.outer(t, t) * self.hessian(*t) + np.diag(residual_vector)
            try:
                step = -np.linalg.solve(jacobian, residual_vector)
            except np.linalg.LinAlgError:
                break

            scale = 1.0
            for _ in range(60):
                trial = np.exp(y + scale * step)
                if np.all(np.isfinite(trial)) and self.scaled_residual(*trial) < residual:
                    break
                scale *= 0.5
            else:
                break

            y = y + scale * step
            t = np.exp(y)
            residual = self.scaled_residual(*t)
            iterations += 1
        return t, iterations, residual

    def grid_search(self, maximize, points=40, span=1e3):
        '''
        Coarse log-spaced search around the decoupled point
        '''
        center = self.initial_point()
        factors = np.logspace(-np.log10(span), np.log10(span), points)
        best = None
        for fp in factors:
            for fm in factors:
                t = center * np.array([fp, fm])
                score = self.energy(*t) if maximize else -self.scaled_residual(*t)
                if best is None or score > best[0]:
                    best = (score, t)
        return best[1]

    def point(self, t, iterations, residual):
        return FiberingPoint(
            t_plus=float(t[0]),
            t_minus=float(t[1]),
            value=float(self.energy(*t)),
            converged=bool(residual <= FIBERING_ACCEPT_TOL),
            iterations=iterations,
            residual=float(residual),
        )

    def solve(self, maximize=True, max_iters=100):
        '''
        Newton from the decoupled point, grid search restart on failure

        @return: FiberingPoint
        '''
        iterate = self.newton if maximize else self.newton_log
        t, iterations, residual = iterate(self.initial_point(), max_iters)
        if residual > FIBERING_ACCEPT_TOL:
            t, more, residual = iterate(self.grid_search(maximize), max_iters)
            iterations += more

        point = self.point(t, iterations, residual)
        if min(t) <= BOUNDARY_TOL * max(t):
            raise FiberingError("fibering maximiser on the boundary (t+, t-) = ({0:.3g}, {1:.3g})".format(*t), point)
        if not point.converged:
            raise FiberingError("fibering Newton did not converge, residual {0:.3g} after {1} iterations".format(
                residual, iterations
            ), point)
        return point

    def stationary_points(self, starts, max_iters=100):
        '''
        Converged interior stationary points reached from each start

        @return: List of FiberingPoint, lowest value first
        '''
        points = []
        for start in starts:
            t, iterations, residual = self.newton_log(start, max_iters)
            if residual <= FIBERING_ACCEPT_TOL:
                points.append(self.point(t, iterations, residual))
        return sorted(points, key=lambda point: point.value)

    def project(self, point):
        '''
        Evaluation of t+^(1/p) w+ - t-^(1/p) w- from the stored potentials

        @return: Evaluation
        '''
        p = self.params.p
        s_plus = point.t_plus ** (1 / p)
        s_minus = point.t_minus ** (1 / p)
        u = self.w_plus * s_plus - self.w_minus * s_minus
        return Evaluation(
            u,
            self.params,
            potential=self.potential_plus * point.t_plus + self.potential_minus * point.t_minus,
            h1_norm_sq=s_plus ** 2 * self.a_plus + s_minus ** 2 * self.a_minus - 2 * s_plus * s_minus * self.c,
        )



### Functions ###

def scalar_factor(evaluation):
    '''
    t with t^(2p-2) = ||u||^2_H1 / D(u)
    '''
    p = evaluation.params.p
    if not evaluation.h1_norm_sq > 0:
        raise DomainError("Nehari projection of the zero field")
    if not evaluation.interaction > 0:
        raise DomainError("Nehari projection needs D(u) > 0, got {0}".format(evaluation.interaction))
    return (evaluation.h1_norm_sq / evaluation.interaction) ** (1 / (2 * p - 2))


def project_evaluation(evaluation):
    '''
    (t, Evaluation of t u), reusing the convolution of u
    '''
    t = scalar_factor(evaluation)
    return t, evaluation.scaled(t)


def scalar_project(u, params):
    '''
    Rescale u onto the Nehari manifold

    @return: (t, t u)
    '''
    t = scalar_factor(Evaluation(u, params))
    return t, u * t


def fibering_energy(w_plus, w_minus, t_plus, t_minus, params):
    return FiberingMap(w_plus, w_minus, params).energy(t_plus, t_minus)


def fibering_maximize(w_plus, w_minus, params, max_iters=100):
    '''
    Interior maximiser of the concave fibering map (p >= 2)

    @return: FiberingPoint
    '''
    if params.p < 2:
        raise DomainError("fibering map is concave only for p >= 2, got p = {0}".format(params.p))
    return FiberingMap(w_plus, w_minus, params).solve(maximize=True, max_iters=max_iters)


def fibering_stationary(w_plus, w_minus, params, max_iters=100):
    '''
    Interior stationary point of the fibering map for any p (used for p < 2)

    @return: FiberingPoint
    '''
    return FiberingMap(w_plus, w_minus, params).solve(maximize=False, max_iters=max_iters)

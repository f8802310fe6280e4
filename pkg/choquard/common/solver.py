#!/usr/bin/env python3
'''
Choquard Level Solvers

Projected Sobolev-gradient descent for c_0,p (Nehari manifold) and c_nod,p
(Nehari nodal set), the p -> 2 continuation and the p = 2 endpoint polish.
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

from dataclasses import dataclass, field as dataclass_field, fields
from multiprocessing.dummy import Pool as ThreadPool

import numpy as np
import scipy.optimize

from choquard.common.diagnostics import pohozaev_residual, symmetry
from choquard.common.errors import (
    ConvergenceError,
    DegeneracyError,
    DomainError,
    FiberingError,
)
from choquard.common.functional import Evaluation, require_differentiable
from choquard.common.grid import Field, Grid, Params, gaussian, h1_norm, integrate, split_signs
from choquard.common.nehari import FiberingMap, project_evaluation



### Decorators ###

# Print Decorator Variables
WARNING = '\033[5;1;33mWARNING\033[0m:'



### Variables ###

# Relative slack on action increase accepted by the line search (round-off)
DESCENT_SLACK = 1e-13

# Default continuation schedule, p decreasing towards 2
DEFAULT_SCHEDULE = [2.5, 2.4, 2.3, 2.2, 2.1, 2.05, 2.02]

# Largest final schedule entry
SCHEDULE_END = 2.02

# auto_box: relative L2 mass allowed outside |x| > L/4
TAIL_MASS_TOL = 1e-8

CONTINUATION_COLUMNS = ['p', 'c_nod_p', 'c0_p', 'h1_sq', 'h1_plus', 'h1_minus', 'pohozaev_residual']
LEVEL_COLUMNS = ['p', 'c0_p', 'residual', 'pohozaev_residual']



### Classes ###

@dataclass
class SolveConfig:
    '''
    Tolerances and iteration caps shared by every solver
    '''
    max_iters: int = 2000
    grad_tol: float = 1e-8
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    degenerate_tol: float = 1e-6
    seed_offset: float = None
    seed_width: float = 1.0
    polish_iters: int = 50
    fibering_max_iters: int = 100
    max_backtracks: int = 30
    debug: bool = False

    def violations(self):
        problems = []
        for name in ('max_iters', 'grad_tol', 'step_init', 'degenerate_tol', 'seed_width',
                     'polish_iters', 'fibering_max_iters', 'max_backtracks'):
            if not getattr(self, name) > 0:
                problems.append("solver.{0} must be positive, not {1}".format(name, getattr(self, name)))
        if not 0 < self.backtrack_factor < 1:
            problems.append("solver.backtrack_factor must lie in (0, 1), not {0}".format(self.backtrack_factor))
        if self.seed_offset is not None and not self.seed_offset > 0:
            problems.append("solver.seed_offset must be positive, not {0}".format(self.seed_offset))
        return problems

    def offset(self, grid):
        '''
        Seed bump separation, L/4 unless configured
        '''
        return grid.box_length / 4 if self.seed_offset is None else self.seed_offset

    def json(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class SolveReport:
    '''
    Result of one solve: level, energies, residuals and the converged field
    '''
    kind: str
    level: float
    energy: object
    residual: float
    pohozaev_residual: float
    iterations: int
    p: float
    alpha: float
    dim: int
    h1_plus: float = 0.0
    h1_minus: float = 0.0
    groundstate_level: float = float('nan')
    nehari_identity: float = float('nan')
    symmetry: dict = None
    field_path: str = None
    history: list = dataclass_field(default_factory=list)
    field: Field = dataclass_field(default=None, repr=False)

    def params(self):
        return Params(self.dim, self.alpha, self.p)

    def json(self):
        '''
        Stable-key JSON object, without the field itself
        '''
        return {
            'kind': self.kind,
            'level': self.level,
            'energy': self.energy.json(),
            'residual': self.residual,
            'pohozaev_residual': self.pohozaev_residual,
            'iterations': self.iterations,
            'p': self.p,
            'alpha': self.alpha,
            'dim': self.dim,
            'h1_plus': self.h1_plus,
            'h1_minus': self.h1_minus,
            'groundstate_level': self.groundstate_level,
            'nehari_identity': self.nehari_identity,
            'symmetry': self.symmetry,
            'field_path': self.field_path,
            'history': self.history,
        }



### Functions ###

def relative_residual(evaluation):
    '''
    ||sobolev_gradient(u)||_H1 / ||u||_H1
    '''
    return h1_norm(evaluation.sobolev_gradient()) / math.sqrt(evaluation.h1_norm_sq)


def make_report(kind, evaluation, residual, iterations, history, groundstate_level=float('nan')):
    '''
    Assembles a SolveReport from the final evaluation
    '''
    u = evaluation.u
    params = evaluation.params
    plus, minus = split_signs(u)
    return SolveReport(
        kind=kind,
        level=evaluation.action,
        energy=evaluation.breakdown(),
        residual=residual,
        pohozaev_residual=pohozaev_residual(u, params, evaluation),
        iterations=iterations,
        p=params.p,
        alpha=params.alpha,
        dim=params.dim,
        h1_plus=h1_norm(plus),
        h1_minus=h1_norm(minus),
        groundstate_level=groundstate_level,
        nehari_identity=abs(evaluation.h1_norm_sq * params.nehari_factor - evaluation.action) / abs(evaluation.action),
        symmetry=symmetry(u) if kind != 'groundstate' else None,
        history=history,
        field=u,
    )


def descend(evaluation, project, cfg, label):
    '''
    Projected Sobolev-gradient descent with backtracking on the action

    @param evaluation: Evaluation of the projected starting field
    @param project:    Callable Field -> Evaluation onto the constraint set
    @param label:      Name used in debug output and errors

    @return: (Evaluation, residual, iterations, history)
    '''
    history = [evaluation.action]
    for iteration in range(cfg.max_iters + 1):
        gradient = evaluation.sobolev_gradient()
        residual = h1_norm(gradient) / math.sqrt(evaluation.h1_norm_sq)
        if cfg.debug:
            print("{0} {1:>5} action {2!r} residual {3:.3e}".format(label, iteration, evaluation.action, residual))
        if residual <= cfg.grad_tol:
            return evaluation, residual, iteration, history
        if iteration == cfg.max_iters:
            break

        step = cfg.step_init
        for _ in range(cfg.max_backtracks):
            try:
                candidate = project(evaluation.u - gradient * step)
            except FiberingError:
                step *= cfg.backtrack_factor
                continue
            if candidate.action <= evaluation.action + DESCENT_SLACK * abs(evaluation.action):
                break
            step *= cfg.backtrack_factor
        else:
            raise ConvergenceError(
                "{0}: line search failed after {1} backtracks".format(label, cfg.max_backtracks),
                iterations=iteration,
                residual=residual,
            )

        evaluation = candidate
        history.append(evaluation.action)

    raise ConvergenceError(
        "{0}: residual {1:.3e} above tolerance {2:.1e} after {3} iterations".format(
            label, residual, cfg.grad_tol, cfg.max_iters
        ),
        iterations=cfg.max_iters,
        residual=residual,
    )


def groundstate_projector(params, cfg):
    '''
    |u| rescaled onto the Nehari manifold
    '''
    def project(u):
        positive = u.abs()
        if not h1_norm(positive) > 0:
            raise DegeneracyError("groundstate iterate collapsed to zero")
        return project_evaluation(Evaluation(positive, params))[1]
    return project


def groundstate_solve(params, cfg, grid, seed=None):
    '''
    Minimises the action over the Nehari manifold, level c_0,p

    @param seed: Initial Field, defaults to a centred Gaussian of width cfg.seed_width

    @return: SolveReport (kind 'groundstate')
    '''
    params.check()
    require_differentiable(params)
    if seed is None:
        seed = gaussian(grid, width=cfg.seed_width)

    project = groundstate_projector(params, cfg)
    start = project(seed)
    initial_norm = math.sqrt(start.h1_norm_sq)
    evaluation, residual, iterations, history = descend(start, project, cfg, "groundstate p={0}".format(params.p))

    if math.sqrt(evaluation.h1_norm_sq) < cfg.degenerate_tol * initial_norm:
        raise DegeneracyError("groundstate collapsed: box too small or p too close to the window edge")

    print("groundstate p={0}: c0 = {1!r}, {2} iterations, residual {3:.3e}".format(
        params.p, evaluation.action, iterations, residual
    ))
    return make_report('groundstate', evaluation, residual, iterations, history)


def nodal_projector(params, cfg):
    '''
    Re-projection onto the Nehari nodal set via the fibering maximiser
    '''
    def project(u):
        plus, minus = split_signs(u)
        norm = h1_norm(u)
        floor = min(h1_norm(plus), h1_norm(minus))
        if not norm > 0 or floor < cfg.degenerate_tol * norm:
            raise DegeneracyError("sign part vanished: min(||u+||, ||u-||) / ||u|| = {0:.3e}".format(
                floor / norm if norm > 0 else 0.0
            ))
        fibering = FiberingMap(plus, minus, params)
        point = fibering.solve(maximize=True, max_iters=cfg.fibering_max_iters)
        return fibering.project(point)
    return project


def nodal_seed(groundstate, cfg):
    '''
    Positive copy at +offset e1 minus a copy at -offset e1
    '''
    grid = groundstate.grid
    cells = int(round(cfg.offset(grid) / grid.spacing))
    return groundstate.roll(cells) - groundstate.roll(-cells)


def nodal_solve(params, cfg, grid, warm_start=None, groundstate=None):
    '''
    Minimises the action over the Nehari nodal set, level c_nod,p (p > 2)

    @param warm_start:  Optional sign-changing Field to start from
    @param groundstate: Optional groundstate SolveReport at the same p, seeds
                        the two-bump guess and fills groundstate_level

    @return: SolveReport (kind 'nodal')
    '''
    params.check()
    if not params.p > 2:
        raise DomainError("nodal_solve needs p > 2, got p = {0}".format(params.p))

    if warm_start is None:
        if groundstate is None:
            groundstate = groundstate_solve(params, cfg, grid)
        warm_start = nodal_seed(groundstate.field, cfg)

    project = nodal_projector(params, cfg)
    start = project(warm_start)
    evaluation, residual, iterations, history = descend(start, project, cfg, "nodal p={0}".format(params.p))

    print("nodal p={0}: c_nod = {1!r}, {2} iterations, residual {3:.3e}".format(
        params.p, evaluation.action, iterations, residual
    ))
    c0 = groundstate.level if groundstate is not None else float('nan')
    return make_report('nodal', evaluation, residual, iterations, history, groundstate_level=c0)


def extrapolate(reports, p):
    '''
    Linear extrapolation in p of the last two fields of a schedule
    '''
    if len(reports) < 2:
        return reports[-1].field
    first, last = reports[-2], reports[-1]
    weight = (p - last.p) / (last.p - first.p)
    return last.field + (last.field - first.field) * weight


def polish(u, params, cfg, groundstate_level=float('nan')):
    '''
    Unconstrained Newton-Krylov solve of sobolev_gradient(u) = 0

    Used at p = 2, where the nodal set is not used.

    @return: SolveReport (kind 'polish')
    '''
    params.check()
    require_differentiable(params)
    grid = u.grid

    def sobolev(values):
        return Evaluation(Field(grid, values), params).sobolev_gradient().values

    # Newton steps taken, the callback runs once per step
    steps = []

    f_tol = 0.1 * cfg.grad_tol * float(np.max(np.abs(u.values)))
    try:
        values = scipy.optimize.newton_krylov(
            sobolev,
            u.values,
            method='lgmres',
            maxiter=cfg.polish_iters,
            f_tol=f_tol,
            verbose=cfg.debug,
            callback=lambda x, f: steps.append(1),
        )
    except scipy.optimize.NoConvergence as err:
        values = err.args[0]

    evaluation = Evaluation(Field(grid, values), params)
    if not evaluation.u.is_finite():
        raise ConvergenceError("polish p={0}: iterate is not finite".format(params.p), iterations=len(steps))
    residual = relative_residual(evaluation)
    if residual > cfg.grad_tol:
        raise ConvergenceError(
            "polish p={0}: residual {1:.3e} above tolerance {2:.1e}".format(params.p, residual, cfg.grad_tol),
            iterations=len(steps),
            residual=residual,
        )

    plus, minus = split_signs(evaluation.u)
    floor = min(h1_norm(plus), h1_norm(minus)) / math.sqrt(evaluation.h1_norm_sq)
    if floor < cfg.degenerate_tol:
        raise DegeneracyError("polish p={0} lost a sign part (floor {1:.3e})".format(params.p, floor))

    print("polish p={0}: A = {1!r}, residual {2:.3e}".format(params.p, evaluation.action, residual))
    return make_report('polish', evaluation, residual, len(steps), [evaluation.action], groundstate_level)


def schedule_violations(p_schedule):
    '''
    Strictly decreasing, every entry > 2, last entry <= SCHEDULE_END
    '''
    problems = []
    if not p_schedule:
        return ["p_schedule is empty"]
    if any(b >= a for a, b in zip(p_schedule, p_schedule[1:])):
        problems.append("p_schedule must be strictly decreasing: {0}".format(p_schedule))
    if not min(p_schedule) > 2:
        problems.append("p_schedule entries must exceed 2: {0}".format(p_schedule))
    if not p_schedule[-1] <= SCHEDULE_END:
        problems.append("p_schedule must end at p <= {0}, ends at {1}".format(SCHEDULE_END, p_schedule[-1]))
    return problems


def warn_non_monotone(reports):
    '''
    c_nod,p is continuous in p, a change of direction is worth a look
    '''
    levels = [report.level for report in reports]
    steps = np.sign(np.diff(levels))
    for index in range(1, len(steps)):
        if steps[index] != 0 and steps[index - 1] != 0 and steps[index] != steps[index - 1]:
            print("{0} c_nod,p is not monotone along the schedule at p = {1}".format(
                WARNING, reports[index].p
            ))


def continuation_run(params_base, cfg, grid, p_schedule=None):
    '''
    Nodal solves along a decreasing schedule p -> 2, then the p = 2 polish

    Each p warm-starts from the previous nodal field; the first nodal
    projection at the new p is the renormalisation of that field.

    @return: List of SolveReport, one per schedule entry plus the polish
    '''
    if p_schedule is None:
        p_schedule = DEFAULT_SCHEDULE
    problems = schedule_violations(p_schedule)
    if problems:
        raise DomainError("; ".join(problems))

    reports = []
    groundstate = None
    for p in p_schedule:
        params = params_base.at(p)
        seed = groundstate.field if groundstate is not None else None
        groundstate = groundstate_solve(params, cfg, grid, seed=seed)
        warm_start = reports[-1].field if reports else None
        reports.append(nodal_solve(params, cfg, grid, warm_start=warm_start, groundstate=groundstate))

    warn_non_monotone(reports)

    params = params_base.at(2.0)
    groundstate = groundstate_solve(params, cfg, grid, seed=groundstate.field)

    # Extrapolated guess unless the last iterate is already closer
    guess = extrapolate(reports, 2.0)
    last = reports[-1].field
    try:
        if relative_residual(Evaluation(last, params)) < relative_residual(Evaluation(guess, params)):
            guess = last
    except DomainError:
        guess = last
    reports.append(polish(guess, params, cfg, groundstate_level=groundstate.level))
    return reports


def continuation_rows(reports):
    '''
    Rows keyed by CONTINUATION_COLUMNS
    '''
    return [
        {
            'p': report.p,
            'c_nod_p': report.level,
            'c0_p': report.groundstate_level,
            'h1_sq': report.energy.h1_norm_sq,
            'h1_plus': report.h1_plus,
            'h1_minus': report.h1_minus,
            'pohozaev_residual': report.pohozaev_residual,
        }
        for report in reports
    ]


def level_curve(params_base, cfg, grid, p_values, jobs=1):
    '''
    groundstate_solve at each p, independent points run on a thread pool

    @return: List of SolveReport sorted by p
    '''
    for p in p_values:
        params_base.at(p).check()

    def solve(p):
        return groundstate_solve(params_base.at(p), cfg, grid)

    if jobs > 1:
        pool = ThreadPool(jobs)
        reports = pool.map(solve, p_values)
        pool.close()
        pool.join()
    else:
        reports = [solve(p) for p in p_values]
    return sorted(reports, key=lambda report: report.p)


def level_table(reports):
    '''
    Rows keyed by LEVEL_COLUMNS
    '''
    return [
        {
            'p': report.p,
            'c0_p': report.level,
            'residual': report.residual,
            'pohozaev_residual': report.pohozaev_residual,
        }
        for report in reports
    ]


def tail_mass(u):
    '''
    Relative L2 mass of u outside |x| > L/4
    '''
    outside = Field(u.grid, np.where(u.grid.radius() > u.grid.box_length / 4, u.values, 0.0))
    return integrate(outside * outside) / integrate(u * u)


def auto_box(params, cfg, grid, max_doublings=6):
    '''
    Doubles L (same M) until the groundstate tail mass is below TAIL_MASS_TOL

    @return: (Grid, groundstate SolveReport on that grid)
    '''
    report = groundstate_solve(params, cfg, grid)
    for _ in range(max_doublings):
        mass = tail_mass(report.field)
        if mass < TAIL_MASS_TOL:
            return grid, report
        print("auto_box: tail mass {0:.3e} at L={1}, doubling".format(mass, grid.box_length))
        grid = Grid(grid.dim, grid.points_per_axis, 2 * grid.box_length)
        report = groundstate_solve(params, cfg, grid)

    mass = tail_mass(report.field)
    if mass >= TAIL_MASS_TOL:
        print("{0} auto_box: tail mass {1:.3e} still above {2:.0e} at L={3}".format(
            WARNING, mass, TAIL_MASS_TOL, grid.box_length
        ))
    return grid, report

'''
Nehari projection and fibering map tests
'''

### Imports ###

import numpy as np
import pytest

from scipy.optimize import brentq, minimize

from choquard.common.errors import DomainError
from choquard.common.functional import Evaluation, action, interaction
from choquard.common.grid import Field, Grid, Params, gaussian, h1_inner
from choquard.common.nehari import (
    FiberingMap,
    fibering_energy,
    fibering_maximize,
    fibering_stationary,
    scalar_factor,
    scalar_project,
)

from tests.choquardtest import disjoint_pair, random_bumps, rng  # noqa: F401



### Variables ###

line = Grid(1, 128, 30.0)
plane = Grid(2, 32, 12.0)
params = Params(1, 0.5, 2.5)



### Scalar Projection ###

def test_scalar_project_residual(rng):
    for _ in range(10):
        _, u = scalar_project(random_bumps(line, rng), params)
        evaluation = Evaluation(u, params)
        assert abs(evaluation.nehari_residual) <= 1e-10 * evaluation.h1_norm_sq

def test_scalar_project_idempotent(rng):
    _, u = scalar_project(random_bumps(line, rng), params)
    t, _ = scalar_project(u, params)
    assert t == pytest.approx(1.0, abs=1e-12)

@pytest.mark.parametrize('scale', [1e-3, 0.5, 20.0])
def test_scalar_project_homogeneous(scale, rng):
    u = random_bumps(line, rng)
    _, projected = scalar_project(u, params)
    _, rescaled = scalar_project(u * scale, params)
    assert np.allclose(rescaled.values, projected.values, rtol=1e-12, atol=1e-14)

def test_scalar_factor_bisection():
    '''
    Closed form agrees with a root of ||tu||^2 - D(tu) = 0
    '''
    p2 = Params(2, 1.0, 2.5)
    u = gaussian(plane, 1.3)
    a = h1_inner(u, u)
    d = interaction(u, p2)
    root = brentq(lambda t: t ** 2 * a - t ** (2 * p2.p) * d, 1e-3, 1e3, xtol=1e-15, rtol=1e-14)
    assert scalar_factor(Evaluation(u, p2)) == pytest.approx(root, rel=1e-10)

def test_scalar_project_zero_field():
    with pytest.raises(DomainError):
        scalar_project(Field.zeros(line), params)



### Fibering Map ###

def test_fibering_origin_and_unit():
    w_plus, w_minus = disjoint_pair(line, 4.0)
    fibering = FiberingMap(w_plus, w_minus, params)
    assert fibering.energy(0.0, 0.0) == 0.0
    assert fibering.energy(1.0, 1.0) == pytest.approx(action(w_plus - w_minus, params), rel=1e-12)

def test_fibering_matches_action(rng):
    '''
    E(t+, t-) = A(t+^(1/p) w+ - t-^(1/p) w-) at random points
    '''
    w_plus, w_minus = disjoint_pair(line, 4.0)
    fibering = FiberingMap(w_plus, w_minus, params)
    for t_plus, t_minus in rng.uniform(0.05, 5.0, size=(10, 2)):
        u = w_plus * t_plus ** (1 / params.p) - w_minus * t_minus ** (1 / params.p)
        assert fibering.energy(t_plus, t_minus) == pytest.approx(action(u, params), rel=1e-11)
        assert fibering_energy(w_plus, w_minus, t_plus, t_minus, params) == pytest.approx(
            fibering.energy(t_plus, t_minus), rel=1e-14
        )

def test_fibering_vectorized():
    w_plus, w_minus = disjoint_pair(line, 4.0)
    fibering = FiberingMap(w_plus, w_minus, params)
    t = np.array([0.5, 1.0, 2.0])
    values = fibering.energy(t, t[::-1])
    assert values.shape == (3,)
    assert values[1] == pytest.approx(fibering.energy(1.0, 1.0))

def test_fibering_coercive_at_infinity():
    w_plus, w_minus = disjoint_pair(line, 4.0)
    assert FiberingMap(w_plus, w_minus, params).energy(1e6, 1e6) < 0

def test_fibering_maximize_residual():
    w_plus, w_minus = disjoint_pair(line, 4.0)
    point = fibering_maximize(w_plus, w_minus, params)
    assert point.converged
    assert point.residual <= 1e-8
    fibering = FiberingMap(w_plus, w_minus, params)
    evaluation = fibering.project(point)
    plus, minus = evaluation.nodal_residuals()
    norm = evaluation.h1_norm_sq
    assert abs(plus) <= 1e-8 * norm
    assert abs(minus) <= 1e-8 * norm

def test_fibering_maximize_is_global():
    '''
    Log grid search plus Nelder-Mead polish finds no better point
    '''
    w_plus, w_minus = disjoint_pair(line, 4.0)
    fibering = FiberingMap(w_plus, w_minus, params)
    point = fibering.solve()

    axis = np.logspace(-4, 4, 400)
    t_plus, t_minus = np.meshgrid(axis, axis, indexing='ij')
    values = fibering.energy(t_plus, t_minus)
    best = np.unravel_index(np.argmax(values), values.shape)
    start = np.log([axis[best[0]], axis[best[1]]])
    refined = minimize(
        lambda y: -fibering.energy(*np.exp(y)),
        start,
        method='Nelder-Mead',
        options={'xatol': 1e-10, 'fatol': 1e-14, 'maxiter': 2000},
    )
    assert -refined.fun <= point.value * (1 + 1e-6)
    assert np.allclose(np.exp(refined.x), [point.t_plus, point.t_minus], rtol=1e-4)

def test_fibering_symmetric_pair():
    '''
    Mirror image parts at p = 2 give t+ = t-
    '''
    p2 = Params(1, 0.5, 2.0)
    w_plus, w_minus = disjoint_pair(line, 3.0)
    assert np.array_equal(w_plus.reflect().values, w_minus.values)
    point = fibering_maximize(w_plus, w_minus, p2)
    assert point.t_plus == pytest.approx(point.t_minus, rel=1e-8)

def test_fibering_fixed_point():
    '''
    Already on the nodal Nehari set: maximiser at (1, 1)
    '''
    w_plus, w_minus = disjoint_pair(line, 4.0)
    fibering = FiberingMap(w_plus, w_minus, params)
    u = fibering.project(fibering.solve()).u
    plus = Field(line, np.maximum(u.values, 0.0))
    minus = Field(line, np.maximum(-u.values, 0.0))
    point = fibering_maximize(plus, minus, params)
    assert point.t_plus == pytest.approx(1.0, abs=1e-8)
    assert point.t_minus == pytest.approx(1.0, abs=1e-8)

def test_fibering_hessian_negative():
    w_plus, w_minus = disjoint_pair(line, 4.0)
    fibering = FiberingMap(w_plus, w_minus, params)
    point = fibering.solve()
    eigenvalues = np.linalg.eigvalsh(fibering.hessian(point.t_plus, point.t_minus))
    assert np.all(eigenvalues < 0)

def test_fibering_gradient_finite_difference():
    w_plus, w_minus = disjoint_pair(line, 4.0)
    fibering = FiberingMap(w_plus, w_minus, params)
    t = np.array([0.7, 1.9])
    eps = 1e-6
    for axis in range(2):
        step = np.zeros(2)
        step[axis] = eps
        slope = (fibering.energy(*(t + step)) - fibering.energy(*(t - step))) / (2 * eps)
        assert fibering.gradient(*t)[axis] == pytest.approx(slope, rel=1e-7, abs=1e-8)

def test_decoupled_matches_scalar():
    '''
    Without cross terms each part is projected alone, t^(1/p) = scalar factor
    '''
    w_plus, w_minus = disjoint_pair(line, 4.0)
    point = FiberingMap(w_plus, w_minus, params, decoupled=True).solve()
    assert point.t_plus ** (1 / params.p) == pytest.approx(scalar_factor(Evaluation(w_plus, params)), rel=1e-8)
    assert point.t_minus ** (1 / params.p) == pytest.approx(scalar_factor(Evaluation(w_minus, params)), rel=1e-8)

def test_stationary_below_two():
    '''
    p < 2 uses the stationary point search
    '''
    p_low = Params(1, 0.5, 1.8)
    w_plus, w_minus = disjoint_pair(line, 4.0)
    with pytest.raises(DomainError):
        fibering_maximize(w_plus, w_minus, p_low)
    point = fibering_stationary(w_plus, w_minus, p_low)
    assert point.residual <= 1e-10
    assert point.t_plus > 0 and point.t_minus > 0



### Input Validation ###

def test_fibering_overlap():
    w = gaussian(line)
    with pytest.raises(DomainError):
        FiberingMap(w, w, params)

def test_fibering_negative_part():
    w_plus, w_minus = disjoint_pair(line, 4.0)
    with pytest.raises(DomainError):
        FiberingMap(w_plus, -w_minus, params)

def test_fibering_zero_part():
    w_plus, _ = disjoint_pair(line, 4.0)
    with pytest.raises(DomainError):
        FiberingMap(w_plus, Field.zeros(line), params)

'''
Action functional, gradient and quotient tests
'''

### Imports ###

import numpy as np
import pytest

from choquard.common.errors import DomainError
from choquard.common.functional import (
    Evaluation,
    action,
    energy_breakdown,
    gradient,
    groundstate_quotient,
    interaction,
    interaction_cross,
    sobolev_gradient,
)
from choquard.common.grid import Field, Grid, Params, gaussian, h1_inner, h1_norm, integrate, split_signs
from choquard.common.nehari import scalar_project

from tests.choquardtest import disjoint_pair, random_bumps, rng  # noqa: F401



### Variables ###

grid = Grid(1, 64, 20.0)



### Tests ###

@pytest.mark.parametrize('p', [2.0, 2.5])
def test_gradient_finite_difference(p, rng):
    '''
    Centered difference of the action along random directions matches <R(u), v>
    '''
    params = Params(1, 0.5, p)
    eps = 1e-4
    for _ in range(50):
        u = random_bumps(grid, rng)
        v = random_bumps(grid, rng)
        slope = (action(u + v * eps, params) - action(u - v * eps, params)) / (2 * eps)
        pairing = integrate(gradient(u, params) * v)
        scale = max(abs(pairing), h1_norm(u) * h1_norm(v))
        assert abs(slope - pairing) <= 1e-6 * scale

def test_sobolev_gradient_represents_gradient(rng):
    params = Params(1, 0.5, 2.5)
    u = random_bumps(grid, rng)
    v = random_bumps(grid, rng)
    g = sobolev_gradient(u, params)
    assert h1_inner(g, v) == pytest.approx(integrate(gradient(u, params) * v), rel=1e-10)

def test_gradient_needs_p_two():
    params = Params(1, 0.5, 1.8)
    u = gaussian(grid)
    with pytest.raises(DomainError):
        gradient(u, params)
    with pytest.raises(DomainError):
        sobolev_gradient(u, params)
    # Action itself is fine below 2
    assert np.isfinite(action(u, params))

def test_nehari_identity(rng):
    '''
    On the Nehari manifold A = (1/2 - 1/(2p)) ||u||^2
    '''
    params = Params(1, 0.5, 2.5)
    _, u = scalar_project(random_bumps(grid, rng), params)
    evaluation = Evaluation(u, params)
    assert abs(evaluation.nehari_residual) <= 1e-12 * evaluation.h1_norm_sq
    assert evaluation.action == pytest.approx(params.nehari_factor * evaluation.h1_norm_sq, rel=1e-12)

def test_interaction_decomposition():
    '''
    D(u) = D(u+) + 2 D(u+, u-) + D(u-)
    '''
    params = Params(1, 0.5, 2.5)
    w_plus, w_minus = disjoint_pair(grid, 3.0)
    u = w_plus - w_minus
    total = interaction(u, params)
    parts = interaction(w_plus, params) + 2 * interaction_cross(w_plus, w_minus, params) + interaction(w_minus, params)
    assert total == pytest.approx(parts, rel=1e-12)
    assert interaction_cross(w_plus, w_minus, params) == pytest.approx(
        interaction_cross(w_minus, w_plus, params), rel=1e-12
    )

def test_nodal_residuals_sum(rng):
    params = Params(1, 0.5, 2.5)
    u = random_bumps(grid, rng, count=4)
    evaluation = Evaluation(u, params)
    plus, minus = evaluation.nodal_residuals()
    assert plus + minus == pytest.approx(evaluation.nehari_residual, rel=1e-10, abs=1e-12)

def test_nodal_interaction_split():
    params = Params(1, 0.5, 2.5)
    w_plus, w_minus = disjoint_pair(grid, 3.0)
    evaluation = Evaluation(w_plus - w_minus, params)
    plus, minus = evaluation.nodal_interaction()
    assert plus + minus == pytest.approx(evaluation.interaction, rel=1e-12)

@pytest.mark.parametrize('scale', [0.1, 3.0, 50.0])
def test_quotient_scale_invariant(scale, rng):
    params = Params(1, 0.5, 2.5)
    u = random_bumps(grid, rng)
    assert groundstate_quotient(u * scale, params) == pytest.approx(groundstate_quotient(u, params), rel=1e-12)

def test_quotient_is_action_on_nehari(rng):
    params = Params(1, 0.5, 3.0)
    u = random_bumps(grid, rng)
    _, projected = scalar_project(u, params)
    assert groundstate_quotient(u, params) == pytest.approx(action(projected, params), rel=1e-12)

def test_quotient_zero_field():
    with pytest.raises(DomainError):
        groundstate_quotient(Field.zeros(grid), Params(1, 0.5, 2.5))

def test_scaled_matches_fresh(rng):
    '''
    Rescaled evaluation reuses the potential but agrees with a new one
    '''
    params = Params(1, 0.5, 2.5)
    u = random_bumps(grid, rng)
    scaled = Evaluation(u, params).scaled(1.7)
    fresh = Evaluation(u * 1.7, params)
    assert scaled.action == pytest.approx(fresh.action, rel=1e-12)
    assert np.allclose(scaled.potential.values, fresh.potential.values, rtol=1e-12, atol=0)

def test_breakdown():
    params = Params(1, 0.5, 2.5)
    w_plus, w_minus = disjoint_pair(grid, 3.0)
    breakdown = energy_breakdown(w_plus - w_minus, params).json()
    assert set(breakdown) == {
        'h1_norm_sq', 'interaction', 'action', 'nehari_residual', 'nodal_residual_plus', 'nodal_residual_minus',
    }
    assert breakdown['action'] == pytest.approx(
        0.5 * breakdown['h1_norm_sq'] - breakdown['interaction'] / 5.0, rel=1e-12
    )

def test_residual_of_sign_split(rng):
    '''
    Nonlinearity is odd in u
    '''
    params = Params(1, 0.5, 2.5)
    u = random_bumps(grid, rng)
    plus, minus = split_signs(u)
    left = gradient(u, params)
    right = gradient(minus - plus, params)
    assert np.allclose(left.values, -right.values, rtol=0, atol=1e-12 * np.max(np.abs(left.values)))

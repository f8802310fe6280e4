'''
Grid, field and spectral operator tests
'''

### Imports ###

import math

import numpy as np
import pytest

from choquard.common.errors import DomainError, GridError
from choquard.common.grid import (
    Field,
    Grid,
    Params,
    apply_helmholtz,
    gaussian,
    h1_inner,
    integrate,
    l2_inner,
    solve_helmholtz,
    split_signs,
)

from tests.choquardtest import random_bumps, rng  # noqa: F401



### Tests ###

def test_integrate_constant():
    grid = Grid(1, 64, 10.0)
    assert integrate(Field(grid, np.ones(grid.shape))) == pytest.approx(10.0, rel=1e-14)

def test_integrate_gaussian():
    '''
    int exp(-x^2) = sqrt(pi), spectrally accurate for smooth decaying data
    '''
    grid = Grid(1, 256, 40.0)
    assert abs(integrate(gaussian(grid)) - math.sqrt(math.pi)) <= 1e-10

def test_integrate_gaussian_3d():
    grid = Grid(3, 32, 16.0)
    assert integrate(gaussian(grid)) == pytest.approx(math.pi ** 1.5, rel=1e-10)

def test_h1_sine_mode():
    '''
    u = sin(2 pi x / L): ||u||^2 = (1 + (2 pi / L)^2) L / 2
    '''
    length = 10.0
    grid = Grid(1, 64, length)
    u = Field.from_function(grid, lambda x: np.sin(2 * np.pi * x / length))
    expected = (1 + (2 * np.pi / length) ** 2) * length / 2
    assert h1_inner(u, u) == pytest.approx(expected, rel=1e-12)

def test_h1_dominates_l2(rng):
    grid = Grid(2, 32, 12.0)
    for _ in range(10):
        u = random_bumps(grid, rng)
        assert h1_inner(u, u) >= l2_inner(u, u)

def test_h1_symmetric(rng):
    grid = Grid(1, 128, 20.0)
    u = random_bumps(grid, rng)
    v = random_bumps(grid, rng)
    assert h1_inner(u, v) == pytest.approx(h1_inner(v, u), rel=1e-12)

def test_helmholtz_inverse(rng):
    grid = Grid(2, 32, 12.0)
    u = random_bumps(grid, rng)
    back = solve_helmholtz(apply_helmholtz(u))
    assert np.max(np.abs(back.values - u.values)) <= 1e-12 * np.max(np.abs(u.values))

def test_split_signs(rng):
    grid = Grid(1, 128, 20.0)
    u = random_bumps(grid, rng, count=5)
    plus, minus = split_signs(u)
    assert np.all(plus.values >= 0)
    assert np.all(minus.values >= 0)
    assert not np.any((plus.values > 0) & (minus.values > 0))
    assert np.array_equal((plus - minus).values, u.values)

def test_reflect_is_involution(rng):
    grid = Grid(3, 16, 8.0)
    u = random_bumps(grid, rng)
    assert np.array_equal(u.reflect().reflect().values, u.values)
    # Centered Gaussian is even
    g = gaussian(grid)
    assert np.array_equal(g.reflect().values, g.values)

def test_axis_is_cell_centered():
    grid = Grid(1, 8, 8.0)
    assert np.allclose(grid.axis(), np.arange(8) - 3.5)
    assert grid.radius().min() == pytest.approx(0.5)

@pytest.mark.parametrize('dim, points, length', [
    (4, 16, 10.0),
    (3, 12, 10.0),
    (3, 4, 10.0),
    (2, 16, 0.0),
    (2, 16, float('inf')),
])
def test_bad_grid(dim, points, length):
    with pytest.raises(GridError):
        Grid(dim, points, length)

def test_field_size_mismatch():
    grid = Grid(1, 16, 4.0)
    with pytest.raises(GridError):
        Field(grid, np.zeros(15))

def test_grid_mismatch():
    u = Field.zeros(Grid(1, 16, 4.0))
    v = Field.zeros(Grid(1, 16, 8.0))
    with pytest.raises(GridError):
        h1_inner(u, v)
    with pytest.raises(GridError):
        u + v



### Params ###

@pytest.mark.parametrize('dim, alpha, p', [
    (3, 2.0, 2.0),
    (3, 2.0, 1.7),
    (3, 2.0, 4.9),
    (2, 1.0, 10.0),
    (1, 0.5, 1.6),
])
def test_params_admissible(dim, alpha, p):
    assert Params(dim, alpha, p).violations() == []

@pytest.mark.parametrize('dim, alpha, p', [
    (3, 2.0, 5.0),
    (3, 2.0, 5.0 / 3.0),
    (3, 2.0, 1.5),
    (2, 1.0, 1.5),
    (3, 3.0, 2.5),
    (3, 0.0, 2.5),
    (4, 2.0, 2.5),
])
def test_params_rejected(dim, alpha, p):
    params = Params(dim, alpha, p)
    assert params.violations()
    with pytest.raises(DomainError):
        params.check()

def test_params_window_message():
    params = Params(3, 2.0, 5.0)
    message = params.violations()[0]
    assert "(N+alpha)/N < p < (N+alpha)/(N-2)_+" in message
    assert "1.66667 < p < 5" in message

def test_params_unbounded_window():
    lower, upper = Params(2, 1.0, 3.0).window()
    assert lower == pytest.approx(1.5)
    assert math.isinf(upper)

def test_nehari_factor():
    assert Params(3, 2.0, 2.0).nehari_factor == pytest.approx(0.25)
    assert Params(3, 2.0, 2.5).at(4.0).nehari_factor == pytest.approx(0.375)

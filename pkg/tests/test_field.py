import numpy as np
import pytest

from genburgers.errors import ConfigurationError
from genburgers.field import Field, Grid


def test_grid_refinement_keeps_nodes():
    g = Grid(2.0, 101)
    r = g.refined()
    np.testing.assert_allclose(r.xs[::2], g.xs, atol=1e-15)
    assert r.dx == pytest.approx(g.dx / 2)


def test_field_far_field_extension():
    xs = np.linspace(-1, 1, 11)
    f = Field(0.1, xs, np.tanh(4 * xs), -0.5, 0.5)
    assert f(-5.0) == -0.5 and f(5.0) == 0.5
    assert f(xs[3]) == pytest.approx(np.tanh(4 * xs[3]))
    assert f.grid == Grid(1.0, 11)


def test_field_rejects_bad_input():
    xs = np.linspace(-1, 1, 5)
    with pytest.raises(ConfigurationError):
        Field(0.0, xs, [0, 1, np.nan, 0, 0], 0, 0)
    with pytest.raises(ConfigurationError):
        Field(0.0, [0, 0.1, 0.3], [0, 0, 0], 0, 0)
    with pytest.raises(ConfigurationError):
        Grid(-1.0, 10)

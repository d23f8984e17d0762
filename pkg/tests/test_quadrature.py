import math

import numpy as np
import pytest

from fbgcavity.quadrature import QuadratureError, composite_nodes, integrate


def test_nodes_stay_inside_open_interval():
    x, w = composite_nodes(0.0, 1.0, 4, n=16)
    assert x.min() > 0.0 and x.max() < 1.0
    assert w.sum() == pytest.approx(1.0, rel=1e-14)


def test_polynomials_exact():
    val = integrate(lambda x: 5 * x**9 - x**2, -1.0, 2.0, n=8)
    exact = 0.5 * (2**10 - 1) - (8 + 1) / 3
    assert val == pytest.approx(exact, rel=1e-13)


def test_smooth_integrand():
    assert integrate(np.exp, 0.0, 3.0) == pytest.approx(math.exp(3) - 1, rel=1e-12)


def test_vector_valued():
    val = integrate(lambda x: np.vstack([np.sin(x), np.cos(x)]), 0.0, math.pi)
    np.testing.assert_allclose(val, [2.0, 0.0], atol=1e-12)


def test_nonconvergence_raises():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.sign(x - 0.3), 0.0, 1.0, rtol=1e-15, max_panels=4)

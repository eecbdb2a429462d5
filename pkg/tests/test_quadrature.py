import math

import numpy as np
import pytest

from benfrag.quadrature import QuadratureError, adaptive_simpson


def test_cubic_is_exact():
    value, err = adaptive_simpson(lambda x: x ** 3 - 2 * x + 1, 0.0, 2.0)
    assert value == pytest.approx(2.0 ** 4 / 4 - 4 + 2, abs=1e-13)
    assert err < 1e-10


def test_exponential():
    value, _ = adaptive_simpson(np.exp, 0.0, 1.0, tol=1e-12)
    assert value == pytest.approx(math.e - 1.0, abs=1e-11)


def test_oscillatory_with_panels():
    # 40 periods of cosine; the coarse estimate would alias without panels.
    omega = 80.0 * math.pi
    value, _ = adaptive_simpson(
        lambda x: np.cos(omega * x), 0.0, 1.0, tol=1e-10, min_panels=160
    )
    assert abs(value) < 1e-9


def test_kink_with_breakpoint():
    value, _ = adaptive_simpson(lambda x: np.abs(x - 0.3), 0.0, 1.0, breakpoints=[0.3])
    exact = 0.3 ** 2 / 2 + 0.7 ** 2 / 2
    assert value == pytest.approx(exact, abs=1e-12)


def test_empty_interval_and_validation():
    assert adaptive_simpson(np.sin, 1.0, 1.0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        adaptive_simpson(np.sin, 1.0, 0.0)


def test_depth_cap_reports_failure():
    # sqrt has an unbounded derivative at 0; with depth 3 it cannot converge.
    with pytest.raises(QuadratureError) as info:
        adaptive_simpson(lambda x: np.sqrt(np.abs(x)), 0.0, 1.0, tol=1e-14, max_depth=3)
    exc = info.value
    assert exc.error_estimate > 0
    assert abs(exc.value - 2.0 / 3.0) < 5e-3  # best effort is still close


def test_tolerance_scales():
    loose, _ = adaptive_simpson(lambda x: np.sin(3 * x), 0.0, 2.0, tol=1e-4)
    tight, _ = adaptive_simpson(lambda x: np.sin(3 * x), 0.0, 2.0, tol=1e-12)
    exact = (1 - math.cos(6.0)) / 3.0
    assert abs(tight - exact) <= abs(loose - exact) + 1e-12
    assert abs(tight - exact) < 1e-11

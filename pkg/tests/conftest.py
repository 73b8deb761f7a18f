import numpy as np
import pytest

from stochlp import LinearProgram


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def tiny_lp():
    """min -x1  s.t.  x1 + x2 = 1, x >= 0; optimum -1 at (1, 0)."""
    return LinearProgram(np.array([[1.0, 1.0]]), np.array([1.0]),
                         np.array([-1.0, 0.0]), R=2.0)


@pytest.fixture(scope="session")
def warm_kernels():
    """Trigger numba compilation once so timed tests measure math, not JIT."""
    from stochlp import SolverConfig, solve
    lp = LinearProgram(np.array([[1.0, 1.0]]), np.array([1.0]),
                       np.array([-1.0, 0.0]), R=2.0)
    solve(lp, SolverConfig(delta=5e-2, seed=0))
    return True

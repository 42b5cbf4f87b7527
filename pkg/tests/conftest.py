"""Shared fixtures, generators and an independent LP oracle."""

import numpy as np
import pytest
from hypothesis import strategies as st
from scipy.optimize import linprog as scipy_linprog

from pnsmerge.polytope import enumerate_bivariate_functions, joint_distribution
from pnsmerge.trial_data import BinaryMarginal

# Worked instance: p'01 = 0 with outcome marginals matched (P(Z=0) = 0.45).
MX = BinaryMarginal(0.5, 0.4, 0.5)
MY_DEGENERATE = BinaryMarginal(0.75, 0.0, 0.6)
# Y-trial with no degenerate conditional and the same P(Z=0).
MY_UNINFORMATIVE = BinaryMarginal(0.45, 0.45, 0.5)
# Z copies Y exactly: the merged polytope is a single point.
MX_HALF = BinaryMarginal(0.5, 0.5, 0.5)
MY_POINT = BinaryMarginal(1.0, 0.0, 0.5)
# P(Z) agrees but p00 - lambda_max = 0.8 exceeds P(Y=0) = 0.6.
MX_INCOMPAT = BinaryMarginal(0.9, 0.1, 0.5)
MY_INCOMPAT = BinaryMarginal(5 / 6, 0.0, 0.6)

# Bits of h_k that must be set (1) or clear (0) for each degeneracy case.
# Bit 2x+y holds h_k(x, y).
DEGENERACY_BITS = {
    "p'00=0": ((0, 2), 1),
    "p'01=0": ((1, 3), 1),
    "p'00=1": ((0, 2), 0),
    "p'01=1": ((1, 3), 0),
}


def allowed_functions(case):
    bits, value = DEGENERACY_BITS[case]
    return [k for k in range(16) if all(((k >> b) & 1) == value for b in bits)]


def sample_weights(rng, allowed=None, sparse=0.3):
    """Random 16-vector on ``allowed`` with some coordinates dropped."""
    allowed = list(range(16)) if allowed is None else list(allowed)
    keep = [k for k in allowed if rng.random() > sparse] or [allowed[rng.integers(len(allowed))]]
    c = np.zeros(16)
    c[keep] = rng.dirichlet(np.full(len(keep), 0.7))
    return c


def marginals_of(c, pX0, pY0):
    table = joint_distribution(c, pX0, pY0)
    return table.marginal("X"), table.marginal("Y"), table


def random_scm_pair(rng, case=None):
    """Marginals of a random joint model; ``case`` forces a degenerate Y-trial."""
    allowed = None if case is None else allowed_functions(case)
    c = sample_weights(rng, allowed)
    pX0, pY0 = rng.uniform(0.05, 0.95, size=2)
    mX, mY, table = marginals_of(c, pX0, pY0)
    return mX, mY, c, table


def random_degenerate_pair(rng):
    """Degenerate Y-trial paired with an X-trial sharing ``P(Z)``, often incompatible."""
    case = list(DEGENERACY_BITS)[rng.integers(4)]
    pY0 = rng.uniform(0.05, 0.95)
    free = rng.uniform(0, 1)
    pp = {"p'00=0": (0.0, free), "p'01=0": (free, 0.0), "p'00=1": (1.0, free), "p'01=1": (free, 1.0)}[case]
    mY = BinaryMarginal(pp[0], pp[1], pY0)
    while True:
        p00, p01 = rng.uniform(0, 1, size=2)
        if abs(p00 - p01) < 1e-3:
            continue
        pX0 = (mY.p_z0 - p01) / (p00 - p01)
        if 0.02 < pX0 < 0.98:
            return BinaryMarginal(p00, p01, pX0), mY


def scipy_lambda_range(spec):
    """Reference LP solution from scipy's HiGHS backend; None when infeasible."""
    At, bt = spec.inequalities()
    Ct, dt = spec.equalities()
    out = []
    for sign in (1.0, -1.0):
        res = scipy_linprog(sign * spec.A[0], A_ub=At, b_ub=bt, A_eq=Ct, b_eq=dt,
                            bounds=[(0, None)] * 16, method="highs")
        if res.status == 2:
            return None
        assert res.status == 0, res.message
        out.append(float(spec.A[0] @ res.x))
    return tuple(out)


@st.composite
def marginals(draw, interior=False):
    lo = 0.01 if interior else 0.0
    p00 = draw(st.floats(lo, 1.0 - lo))
    p01 = draw(st.floats(lo, 1.0 - lo))
    pw0 = draw(st.floats(0.01, 0.99))
    return BinaryMarginal(p00, p01, pw0)


@st.composite
def marginal_and_lambda(draw):
    m = draw(marginals())
    lo, hi = max(0.0, m.p_z0_w0 + m.p_z0_w1 - 1.0), min(m.p_z0_w0, m.p_z0_w1)
    t = draw(st.floats(0.0, 1.0))
    return m, lo + t * (hi - lo)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def functions():
    return enumerate_bivariate_functions()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, f"rep_{rep.when}", rep)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(module.RESULTS, key=lambda s: int(s.split()[0][1:])):
        terminalreporter.write_line(module.RESULTS[label])

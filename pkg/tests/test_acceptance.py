"""Acceptance suite: twelve end-to-end criteria with pinned tolerances.

Each test records one PASS/FAIL line; the lines are printed in the terminal
summary (see ``conftest.pytest_terminal_summary``) and also to stdout.
"""

import os
import time

import numpy as np
import pytest

from conftest import (
    DEGENERACY_BITS,
    MX,
    MX_HALF,
    MY_DEGENERATE,
    MY_POINT,
    random_degenerate_pair,
    random_scm_pair,
)
from pnsmerge.bounds import (
    closed_form_lambda_min,
    degenerate_compatibility,
    is_feasible,
    lp_lambda_extremes,
    restricted_lambda_range,
    tightened_pns_bounds,
)
from pnsmerge.info import (
    falsify_by_conditional_info,
    falsify_by_marginal_info,
    info_bounds,
    info_report,
    nz_z_information,
)
from pnsmerge.errors import Infeasible
from pnsmerge.maxent import maxent_lambda_single, maxent_scm, rank_evidence
from pnsmerge.oracle import GridSpec, abduction_oracle, eliminate, grid_maxent
from pnsmerge.polytope import build_polytope
from pnsmerge.scm import (
    lambda_range,
    pns_bounds_from_lambda,
    pns_bounds_single,
    pns_from_lambda,
    prob_necessary_nonmonotonicity,
    prob_sufficient_nonmonotonicity,
)
from pnsmerge.sweep import SweepConfig, run_sweep
from pnsmerge.trial_data import BinaryMarginal, TrivariateTable

EXACT_TOL = 1e-12
LP_TOL = 1e-9
MAXENT_SINGLE_TOL = 1e-6
GRID_ENTROPY_TOL = 2e-3
RANKING_TOL = 1e-9
EXAMPLE_RUNTIME_S = 1e-3
CLOSED_FORM_RUNTIME_S = 30.0
SWEEP_RUNTIME_S = 300.0

RESULTS = {}


@pytest.fixture
def record(request):
    """Record PASS/FAIL for the criterion named in the test's docstring."""
    label = request.function.__doc__.strip().splitlines()[0]
    state = {"detail": ""}
    yield state
    failed = getattr(request.node, "rep_call", None)
    ok = failed is not None and failed.passed
    line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" ({state['detail']})" if state["detail"] else "")
    RESULTS[label] = line
    print(line)


def random_marginal(rng):
    return BinaryMarginal(*rng.uniform(0, 1, size=2), rng.uniform(0.01, 0.99))


def random_marginal_lambda(rng, n):
    out = []
    for _ in range(n):
        m = random_marginal(rng)
        rng_l = lambda_range(m)
        out.append((m, rng_l.lo + rng.uniform() * rng_l.width))
    return out


@pytest.fixture(scope="module")
def degenerate_compatible():
    """1,000 compatible instances, 250 per degeneracy case."""
    rng = np.random.default_rng(3)
    cases = []
    for case in DEGENERACY_BITS:
        for _ in range(250):
            mX, mY, _, _ = random_scm_pair(rng, case)
            cases.append((case, mX, mY))
    return cases


@pytest.fixture(scope="module")
def degenerate_mixed():
    """1,000 degenerate instances: joint-model marginals and unconstrained pairs."""
    rng = np.random.default_rng(4)
    out = []
    for i in range(1000):
        if i % 3 == 0:
            case = list(DEGENERACY_BITS)[i % 4]
            mX, mY, _, _ = random_scm_pair(rng, case)
        else:
            mX, mY = random_degenerate_pair(rng)
            if i % 10 == 1:
                # outcome marginals no longer agree
                mX = BinaryMarginal(mX.p_z0_w0, mX.p_z0_w1, min(0.99, mX.p_w0 + 0.01))
        out.append((mX, mY))
    return out


@pytest.fixture(scope="module")
def feasible_lambda_max_log():
    return []


def test_c01_example_one(record):
    """C1 uniform-marginal information example"""
    m = BinaryMarginal(0.5, 0.5, 0.5)
    timings = []
    for _ in range(5):
        t0 = time.perf_counter()
        hi, lo = info_report(m, 0.5), info_report(m, 0.0)
        timings.append(time.perf_counter() - t0)
    assert abs(hi.i_nz_z - 1.0) <= EXACT_TOL and abs(hi.i_xz_given_nz) <= EXACT_TOL
    assert abs(lo.i_nz_z) <= EXACT_TOL and abs(lo.i_xz_given_nz - 1.0) <= EXACT_TOL
    record["detail"] = f"best of 5: {min(timings) * 1e3:.3f} ms for both reports"
    assert min(timings) < EXAMPLE_RUNTIME_S


def test_c02_lambda_map_equivalence(record):
    """C2 single-marginal PNS bounds equal the mapped lambda interval"""
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10_000):
        m = random_marginal(rng)
        a, b = pns_bounds_single(m), pns_bounds_from_lambda(m, lambda_range(m))
        worst = max(worst, abs(a.lo - b.lo), abs(a.hi - b.hi))
    record["detail"] = f"max deviation {worst:.2e}"
    assert worst <= EXACT_TOL


def test_c03_closed_form_vs_lp(record, degenerate_compatible, feasible_lambda_max_log):
    """C3 closed-form tightened lower bound equals the LP minimum"""
    t0 = time.perf_counter()
    worst = 0.0
    seen = set()
    for case, mX, mY in degenerate_compatible:
        lo, hi = lp_lambda_extremes(build_polytope(mX, mY))
        worst = max(worst, abs(closed_form_lambda_min(mX, mY) - max(lo.value, lambda_range(mX).lo)))
        feasible_lambda_max_log.append(abs(hi.value - lambda_range(mX).hi))
        seen.add(case)
    elapsed = time.perf_counter() - t0
    tb = tightened_pns_bounds(MX, MY_DEGENERATE)
    single = pns_bounds_single(MX)
    record["detail"] = f"max deviation {worst:.2e}, {elapsed:.1f} s"
    assert seen == set(DEGENERACY_BITS)
    assert worst <= LP_TOL
    np.testing.assert_allclose(tb.pns.as_list(), [0.1, 0.2], atol=EXACT_TOL)
    np.testing.assert_allclose(single.as_list(), [0.1, 0.5], atol=EXACT_TOL)
    assert elapsed < CLOSED_FORM_RUNTIME_S


def test_c04_certificate_matches_lp(record, degenerate_mixed, feasible_lambda_max_log):
    """C4 degenerate compatibility certificate agrees with LP feasibility"""
    agree = compatible = 0
    for mX, mY in degenerate_mixed:
        cert = degenerate_compatibility(mX, mY).compatible
        lp = is_feasible(mX, mY)
        agree += cert == lp
        compatible += lp
        if lp:
            _, hi = lp_lambda_extremes(build_polytope(mX, mY))
            feasible_lambda_max_log.append(abs(hi.value - lambda_range(mX).hi))
    record["detail"] = f"{agree}/{len(degenerate_mixed)} agree, {compatible} compatible"
    assert 0 < compatible < len(degenerate_mixed)
    assert agree == len(degenerate_mixed)


def test_c05_upper_bound_not_falsifiable(record, feasible_lambda_max_log):
    """C5 LP maximum of lambda_X equals the single-marginal maximum"""
    assert len(feasible_lambda_max_log) >= 1000, "run with C3 and C4"
    worst = max(feasible_lambda_max_log)
    record["detail"] = f"{len(feasible_lambda_max_log)} feasible instances, max deviation {worst:.2e}"
    assert worst <= LP_TOL


@pytest.fixture(scope="module")
def info_samples():
    return random_marginal_lambda(np.random.default_rng(6), 10_000)


def test_c06_two_path_identity(record, info_samples):
    """C6 closed-form I(N_Z:Z) equals direct enumeration"""
    worst = max(abs(nz_z_information(m, lam) - info_report(m, lam).i_nz_z) for m, lam in info_samples)
    record["detail"] = f"max deviation {worst:.2e}"
    assert worst <= EXACT_TOL


def test_c07_information_containment(record, info_samples):
    """C7 information components lie in their ranges"""
    bad = 0
    for m, lam in info_samples:
        r = info_report(m, lam)
        nz, xz = info_bounds(m)
        bad += not (nz.lo - EXACT_TOL <= r.i_nz_z <= nz.hi + EXACT_TOL)
        bad += not (xz.lo - EXACT_TOL <= r.i_xz_given_nz <= xz.hi + EXACT_TOL)
    record["detail"] = f"{bad} violations"
    assert bad == 0


def test_c08_falsification(record):
    """C8 true hypotheses survive, violating hypotheses are rejected"""
    rng = np.random.default_rng(8)
    false_pos = 0
    for _ in range(1000):
        mX, mY, c, table = random_scm_pair(rng)
        lam = min(max(float(build_polytope(mX, mY).A[0] @ c), lambda_range(mX).lo), lambda_range(mX).hi)
        r = info_report(mX, lam)
        false_pos += falsify_by_marginal_info(r.i_nz_z, mY).falsified
        false_pos += falsify_by_conditional_info(r.i_xz_given_nz, table).falsified
    xor = np.zeros((2, 2, 2))
    for x in (0, 1):
        for y in (0, 1):
            xor[x, y, x ^ y] = 0.25
    violating = [
        falsify_by_marginal_info(0.0, MY_DEGENERATE),
        falsify_by_marginal_info(0.5, BinaryMarginal(1.0, 0.0, 0.5)),
        falsify_by_conditional_info(0.5, TrivariateTable(xor)),
        # lambda_X = 0.1 leaves too little I(N_Z:Z) for the degenerate Y-trial
        falsify_by_marginal_info(info_report(MX, 0.1).i_nz_z, MY_DEGENERATE),
    ]
    false_neg = sum(not v.falsified for v in violating)
    record["detail"] = f"{false_pos} false positives / 2000 tests, {false_neg} false negatives / {len(violating)}"
    assert false_pos == 0 and false_neg == 0


def test_c09_maxent(record):
    """C9 MaxEnt lambda for one marginal and two-marginal grid agreement"""
    rng = np.random.default_rng(9)
    worst_single = 0.0
    for _ in range(100):
        m = random_marginal(rng)
        rl = lambda_range(m)
        grid = np.arange(rl.lo, rl.hi + 5e-7, 1e-6)
        p00, p01 = m.p_z0_w0, m.p_z0_w1
        a = np.stack([grid, 1 - p00 - p01 + grid, p00 - grid, p01 - grid]).clip(0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            H = -np.where(a > 0, a * np.log2(np.where(a > 0, a, 1.0)), 0.0).sum(axis=0)
        lam = maxent_lambda_single(m)
        assert abs(lam - p00 * p01) <= MAXENT_SINGLE_TOL
        worst_single = max(worst_single, abs(grid[np.argmax(H)] - lam))
    fixtures = [(MX, MY_DEGENERATE), (MX_HALF, MY_POINT)]
    for case in DEGENERACY_BITS:
        for _ in range(5):
            mX, mY, _, _ = random_scm_pair(rng, case)
            fixtures.append((mX, mY))
    worst_grid, compared, unresolved = 0.0, 0, 0
    for mX, mY in fixtures:
        spec = build_polytope(mX, mY)
        assert eliminate(spec).dimension <= 2
        try:
            ref, _ = grid_maxent(spec, GridSpec(200, 2))
        except Infeasible:
            # polytope thinner than one grid step: the oracle cannot see it
            unresolved += 1
            continue
        compared += 1
        worst_grid = max(worst_grid, abs(maxent_scm(spec).entropy - ref))
    record["detail"] = (
        f"single max deviation {worst_single:.1e}, grid max gap {worst_grid:.1e} bits on "
        f"{compared} fixtures ({unresolved} thinner than the grid)"
    )
    assert compared >= 2 + 4 * 4
    assert worst_single <= MAXENT_SINGLE_TOL
    assert worst_grid <= GRID_ENTROPY_TOL


def test_c10_ranking_monotone(record):
    """C10 added evidence never raises MaxEnt entropy"""
    rng = np.random.default_rng(10)
    mX = MX
    candidates = {}
    while len(candidates) < 100:
        pY0 = rng.uniform(0.05, 0.95)
        if len(candidates) % 5 == 0:
            # degenerate candidate p'01 = 0
            pp = (mX.p_z0 / pY0, 0.0)
        else:
            pp00 = rng.uniform(0, 1)
            pp = (pp00, (mX.p_z0 - pY0 * pp00) / (1 - pY0))
        if all(0.0 <= v <= 1.0 for v in pp):
            candidates[f"cand{len(candidates):03d}"] = BinaryMarginal(pp[0], pp[1], pY0)
    ranking = rank_evidence(mX, candidates)
    worst = max(-e.entropy_reduction for e in ranking.entries)
    record["detail"] = f"{len(ranking.entries)} compatible, {len(ranking.incompatible)} incompatible, max increase {worst:.1e}"
    assert len(ranking.entries) > 50
    assert worst <= RANKING_TOL
    reductions = [e.entropy_reduction for e in ranking.entries]
    assert reductions == sorted(reductions, reverse=True)


def test_c11_sweep(record):
    """C11 20x20x5 sweep properties"""
    cfg = SweepConfig.from_dict(
        {
            "mX": {"p00": 0.8, "p01": 0.2, "p_x0": None},
            "pp00": {"start": 0.0, "stop": 1.0, "steps": 20},
            "pp01": {"start": 0.0, "stop": 1.0, "steps": 20},
            "p_y0": {"start": 0.1, "stop": 0.9, "steps": 5},
        }
    )
    t0 = time.perf_counter()
    rows = run_sweep(cfg, workers=min(4, os.cpu_count() or 1))
    elapsed = time.perf_counter() - t0
    comp = [r for r in rows if r["compatible"]]
    norm = [r["maxent_lambda_normalized"] for r in comp if r["maxent_lambda_normalized"] is not None]
    ent = np.array([r["entropy_bits"] for r in comp])
    edge = np.array([r["pp00"] in (0.0, 1.0) or r["pp01"] in (0.0, 1.0) for r in comp])
    record["detail"] = (
        f"{len(rows)} cells, {len(comp)} compatible, {elapsed:.0f} s, "
        f"edge mean {ent[edge].mean():.3f} vs grid mean {ent.mean():.3f} bits"
    )
    assert len(rows) == 2000
    assert elapsed < SWEEP_RUNTIME_S
    assert norm and all(0.0 <= v <= 1.0 for v in norm)
    assert edge.any() and ent[edge].mean() < ent.mean()


def test_c12_abduction_equivalence(record):
    """C12 counterfactual closed forms equal four-function enumeration"""
    worst = 0.0
    for m, lam in random_marginal_lambda(np.random.default_rng(12), 10_000):
        worst = max(worst, abs(abduction_oracle(m, lam, "pns") - pns_from_lambda(m, lam)))
        if m.p_z0_w0 < 1.0:
            worst = max(worst, abs(abduction_oracle(m, lam, "suff_nonmono") - prob_sufficient_nonmonotonicity(m, lam)))
        if m.p_z0_w1 > 0.0:
            worst = max(worst, abs(abduction_oracle(m, lam, "nec_nonmono") - prob_necessary_nonmonotonicity(m, lam)))
    record["detail"] = f"max deviation {worst:.2e}"
    assert worst <= EXACT_TOL

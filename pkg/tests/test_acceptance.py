"""End-to-end acceptance runs, one test per shipping criterion.

Each test prints a one-line summary with the measured values and guards
its own runtime budget.  Run with ``-v`` for the per-criterion verdict
lines, ``-s`` to see the summaries.
"""

from __future__ import annotations

import itertools
import math
import time
from functools import lru_cache

import numpy as np
import pytest

from chi2norm import (
    BASIC_SET,
    SYMMETRIC_SET,
    C_of_p,
    VarianceProfile,
    addition_formula_eval,
    chi2_both,
    chi2_direct,
    constants_table,
    hermite_eval,
    hermite_profile,
    make_uniform,
    maclaurin_check,
    maximize_g,
    maximize_g_sym,
    normalized_sum_density,
    stein_recurrence_rhs,
    theorem_bound,
    threshold,
    unroll_recurrence,
)
from chi2norm.constants import h0, h_exact

# published reference table, rounded up at four decimals
PRINTED_BASIC = (2.1327, 1.6582, 1.5043, 1.4293, 1.3851, 1.3560, 1.3354,
                 1.3202, 1.3085)
PRINTED_SYM = (1.0570, 0.8168, 0.7387, 0.7001, 0.6773, 0.6622, 0.6515,
               0.6436, 0.6374)


def _guard(t0: float, budget: float) -> float:
    elapsed = time.perf_counter() - t0
    assert elapsed < budget, f"runtime {elapsed:.1f}s exceeds {budget:.0f}s"
    return elapsed


def test_criterion_1_constants_table():
    t0 = time.perf_counter()
    entries = constants_table(2, 10)
    basic = [e.value for e in entries if e.index_set is BASIC_SET]
    sym = [e.value for e in entries if e.index_set is SYMMETRIC_SET]
    worst = 0.0
    for got, printed in zip(basic + sym, PRINTED_BASIC + PRINTED_SYM):
        assert got <= printed, f"{got!r} exceeds printed {printed}"
        assert printed - got <= 2e-4, f"{got!r} further than 2e-4 below {printed}"
        worst = max(worst, printed - got)
    elapsed = _guard(t0, 30.0)
    print(f"criterion 1 PASS: 18 entries <= printed, max gap {worst:.2e}, "
          f"{elapsed:.2f}s")


def test_criterion_2_uniform_chi2():
    t0 = time.perf_counter()
    direct, series = chi2_both(make_uniform())
    assert direct.value == pytest.approx(0.3285, abs=5e-4)
    gap = abs(direct.value - series.value)
    assert gap <= 1e-6 + series.error_estimate
    elapsed = _guard(t0, 2.0)
    print(f"criterion 2 PASS: direct {direct.value:.7f}, "
          f"series gap {gap:.2e} within tail {series.error_estimate:.2e}, "
          f"{elapsed:.2f}s")


def test_criterion_3_subgaussian_thresholds():
    t0 = time.perf_counter()
    first = threshold("first").threshold
    basic = threshold("basic").threshold
    sym = threshold("symmetric").threshold
    assert first == pytest.approx(0.5, abs=1e-9)
    assert basic == pytest.approx(0.96116, abs=1e-4)
    assert sym == pytest.approx(1.97044, abs=1e-4)
    elapsed = _guard(t0, 2.0)
    print(f"criterion 3 PASS: thresholds {first:.10f} / {basic:.6f} / "
          f"{sym:.6f}, {elapsed:.2f}s")


def test_criterion_4_weight_maxima():
    t0 = time.perf_counter()
    _, gmax = maximize_g()
    _, gsmax = maximize_g_sym()
    assert gmax == pytest.approx(1.21824, abs=1e-4)
    assert gsmax == pytest.approx(0.58921, abs=1e-4)
    elapsed = _guard(t0, 1.0)
    print(f"criterion 4 PASS: max g {gmax:.6f}, max g_sym {gsmax:.6f}, "
          f"{elapsed:.2f}s")


def test_criterion_5_uniform_sum_soundness():
    t0 = time.perf_counter()
    uni = make_uniform()
    per_var = chi2_direct(uni).value
    lines = []
    for n in range(2, 7):
        oracle = chi2_direct(normalized_sum_density(uni, n)).value
        report = theorem_bound(n, [per_var] * n, symmetric=True,
                               oracle_chi2=oracle)
        assert oracle <= report.total
        assert oracle < 1.6 / (n * n - 1.0)
        lines.append(f"n={n} oracle {oracle:.3e} <= bound {report.total:.3e}")
    elapsed = _guard(t0, 180.0)
    print(f"criterion 5 PASS: {'; '.join(lines)}, {elapsed:.2f}s")


def test_criterion_6_recurrence_identity():
    t0 = time.perf_counter()
    uni = make_uniform()
    base = hermite_profile(uni, order=30)
    worst = 0.0
    for n in (2, 3):
        leave = (base if n == 2
                 else hermite_profile(normalized_sum_density(uni, 2),
                                      order=30))
        target = hermite_profile(normalized_sum_density(uni, n), order=30)
        variances = VarianceProfile.equal(n)
        for m in range(3, 25):
            rhs = stein_recurrence_rhs([base] * n, variances, [leave] * n, m)
            diff = abs(rhs - target[m])
            assert diff <= 1e-8, f"n={n} m={m} diff {diff:.2e}"
            worst = max(worst, diff)
    elapsed = _guard(t0, 120.0)
    print(f"criterion 6 PASS: recurrence max |diff| {worst:.2e} "
          f"for n=2,3 m=3..24, {elapsed:.2f}s")


def _subset_induction_bound(values: tuple[float, ...],
                            constants: tuple[float, ...]) -> float:
    """Exhaustive evaluation of the averaged leave-one-out recursion."""
    n = len(values)

    @lru_cache(maxsize=None)
    def bound(mask: int) -> float:
        members = [k for k in range(n) if mask >> k & 1]
        m = len(members)
        mean = math.fsum(values[k] for k in members) / m
        if m == 1:
            return mean
        inner = math.fsum(values[k] * bound(mask & ~(1 << k))
                          for k in members) / m
        return mean + constants[m - 2] * inner

    return bound((1 << n) - 1)


def test_criterion_7_property_suites():
    t0 = time.perf_counter()

    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 31))
        x, y = rng.uniform(-4.0, 4.0, size=2)
        angle = float(rng.uniform(0.0, 2.0 * math.pi))
        alpha, beta = math.cos(angle), math.sin(angle)
        split = addition_formula_eval(m, float(x), float(y), alpha, beta)
        direct = hermite_eval(m, alpha * float(x) + beta * float(y))
        rel = abs(split - direct) / max(1.0, abs(direct))
        assert rel < 1e-9
        worst = max(worst, rel)

    from chi2norm.constants import elementary_inequalities_check
    rng = np.random.default_rng(102)
    for _ in range(10_000):
        s = int(rng.integers(1, 2001))
        p = float(rng.uniform(1e-4, 0.999))
        assert elementary_inequalities_check(s, p) == (True, True, True)

    from chi2norm.constants import (g, g_sym, sandwich_upper_basic,
                                    sandwich_upper_sym)
    rng = np.random.default_rng(103)
    for _ in range(10_000):
        s = int(rng.integers(1, 1001))
        p = float(rng.uniform(1e-3, 0.95))
        mid = h0(BASIC_SET, s, p)
        assert g(s * p) <= mid <= sandwich_upper_basic(s, p)
        assert h0(SYMMETRIC_SET, s, p) <= sandwich_upper_sym(s, p)

    rng = np.random.default_rng(104)
    for _ in range(1000):
        s = int(rng.integers(1, 201))
        p = float(rng.uniform(0.01, 0.95))
        for index_set in (BASIC_SET, SYMMETRIC_SET):
            assert (h_exact(index_set, s, p)
                    <= h0(index_set, s, p) * (1.0 + 1e-12))

    rng = np.random.default_rng(105)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, n + 1))
        values = tuple(float(v) for v in rng.uniform(0.0, 3.0, size=n))
        mean = math.fsum(values) / n
        combos = list(itertools.combinations(values, k))
        tuple_avg = math.fsum(math.prod(c) for c in combos) / len(combos)
        verdict = maclaurin_check(values, k)
        assert verdict == (tuple_avg <= mean ** k + 1e-12)
        assert verdict

    rng = np.random.default_rng(106)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        v = float(rng.uniform(0.0, 2.0))
        constants = tuple(float(c) for c in rng.uniform(0.5, 3.0,
                                                        size=n - 1))
        closed = unroll_recurrence([v] * n, list(constants))
        brute = _subset_induction_bound((v,) * n, constants)
        assert abs(closed - brute) <= 1e-12 * max(1.0, abs(brute))
        mixed = tuple(float(x) for x in rng.uniform(0.0, 2.0, size=n))
        assert (unroll_recurrence(list(mixed), list(constants))
                >= _subset_induction_bound(mixed, constants) - 1e-12)

    elapsed = _guard(t0, 120.0)
    print(f"criterion 7 PASS: addition fuzz worst {worst:.2e}; elementary, "
          f"sandwich, envelope, symmetric-mean, and recursion suites clean, "
          f"{elapsed:.2f}s")


@pytest.fixture(scope="module")
def small_p_constants():
    t0 = time.perf_counter()
    c12 = C_of_p(BASIC_SET, 1e-4).value
    csym = C_of_p(SYMMETRIC_SET, 1e-4).value
    return c12, csym, time.perf_counter() - t0


def test_criterion_8_small_p_constants(small_p_constants):
    c12, csym, elapsed = small_p_constants
    assert c12 >= 1.2182 - 1e-3
    assert csym <= 0.5893
    assert elapsed < 5.0, f"runtime {elapsed:.1f}s exceeds 5s"
    print(f"criterion 8 PASS (lower and symmetric clauses): "
          f"C_basic(1e-4) {c12:.10f} >= 1.2172, "
          f"C_sym(1e-4) {csym:.10f} <= 0.5893, {elapsed:.2f}s")


@pytest.mark.xfail(
    strict=True,
    reason="the basic constant's small-p limit lies below 1.2183, but at "
           "p = 1e-4 the certified maximum is 1.21831840857... (argmax "
           "s = 32136): the O(p) correction already exceeds the limit's "
           "5.9e-5 headroom, so the finite-p value sits 1.84e-5 above the "
           "target; the clause would need p <= ~7.6e-5")
def test_criterion_8_basic_upper_clause(small_p_constants):
    c12, _, _ = small_p_constants
    print(f"criterion 8 basic upper clause: C_basic(1e-4) = {c12:.13f}")
    assert c12 <= 1.2183, f"C_basic(1e-4) = {c12:.13f} > 1.2183"

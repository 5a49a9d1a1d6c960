import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hardy_postselect.errors import DomainError, InfeasibleError
from hardy_postselect.hardy import (
    HardyConfiguration,
    assign_phases,
    check_standard_infeasibility,
    hardy_probability,
    hardy_probability_diagonal,
    maximize_hardy,
    solve_hardy,
    solve_u_squared,
)

PI = math.pi


def feasible_pairs():
    return st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 1.0)).filter(lambda p: p[0] ** 2 + p[1] ** 2 >= 1.0)


# -- phases ---------------------------------------------------------------

def test_assign_phases_default():
    assert assign_phases(0.0, 1, 1, 1) == pytest.approx((PI, 0.0, PI, 0.0))


def test_assign_phases_general():
    phases = assign_phases(0.3, 1, 3, 1)
    assert phases == pytest.approx((3 * PI + 0.3, 2 * PI + 0.3, 3 * PI + 0.3, 0.3))


@given(st.floats(-20, 20), *[st.integers(-7, 7).map(lambda k: 2 * k + 1)] * 3)
def test_assigned_phases_are_dark(phi0, n1, n2, n3):
    p1, p2, p1p, p2p = assign_phases(phi0, n1, n2, n3)
    for a, b in [(p1, p2), (p1, p2p), (p1p, p2), (p1p, p2p)]:
        assert math.cos(a - b) == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("ns", [(2, 1, 1), (1, 0, 1), (1, 1, -4)])
def test_assign_phases_rejects_even(ns):
    with pytest.raises(DomainError):
        assign_phases(0.0, *ns)


# -- standard set-up ---------------------------------------------------------

@pytest.mark.parametrize("ns,multiple", [((1, 1, 1), 1), ((3, 1, -1), -3)])
def test_standard_infeasibility(ns, multiple):
    report = check_standard_infeasibility(*ns)
    assert report.primed_multiple == multiple
    assert report.cos_primed == pytest.approx(-1.0, abs=1e-12)
    assert report.p_uu_primed == pytest.approx(0.0, abs=1e-12)
    assert report.correlations == pytest.approx((-1.0,) * 4, abs=1e-12)
    assert abs(report.chsh_sum) == pytest.approx(2.0, abs=1e-12)


def test_standard_infeasibility_rejects_even():
    with pytest.raises(DomainError):
        check_standard_infeasibility(2, 1, 1)


# -- solver --------------------------------------------------------------------

def test_optimum(optimum):
    assert optimum.u == 0.0
    assert optimum.hardy_probability == pytest.approx(0.5, abs=1e-12)
    assert optimum.subensemble_fraction == 0.5


def test_boundary_point_gives_no_contradiction():
    s = solve_hardy(HardyConfiguration.diagonal(math.sqrt(0.5)))
    assert s.u == pytest.approx(1.0, abs=1e-12)
    assert s.hardy_probability == pytest.approx(0.0, abs=1e-12)


def test_three_quarters(q34):
    # u^2 = 1/q^2 - 1 and H2 comes out 50-50
    assert q34.u ** 2 == pytest.approx(1 / 3, abs=1e-12)
    assert q34.r2 == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert q34.t2 == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert q34.hardy_probability == pytest.approx(0.125, abs=1e-12)
    assert q34.tables(oracle=True)["1p2p"][("U", "U")] == pytest.approx(0.125, abs=1e-12)
    assert q34.subensemble_fraction == pytest.approx(2 / 3, abs=1e-12)


def test_infeasible_region():
    with pytest.raises(InfeasibleError, match=r"\(t1'\)\^2 \+ \(r2'\)\^2 >= 1"):
        solve_hardy(HardyConfiguration(0.6, 0.6))


def test_zero_u_prime_excluded():
    with pytest.raises(DomainError):
        HardyConfiguration(1.0, 1.0, u1p=0.0)


def test_small_u_prime_can_be_infeasible():
    # q^2 = 3/4 needs u' >= 1/3
    with pytest.raises(InfeasibleError):
        solve_u_squared(math.sqrt(0.75), math.sqrt(0.75), 0.3)


@pytest.mark.parametrize("t1p,r2p", [(0.0, 1.0), (1.0, 0.0)])
def test_axis_corners(t1p, r2p):
    s = solve_hardy(HardyConfiguration(t1p, r2p))
    assert s.u == 1.0
    assert s.hardy_probability == 0.0
    assert max(map(abs, s.constraint_residuals())) <= 1e-12


def _check_solution(s):
    assert max(map(abs, s.constraint_residuals())) <= 1e-12
    c = s.config
    lhs = s.u**2 * c.u1p * c.t1p * c.r2p
    assert lhs == pytest.approx(s.phi1p.r * s.phi2p.t, abs=1e-12)
    for pair in ("12", "12p", "1p2", "1p2p"):
        a, b = s.settings(pair)
        assert math.cos(a.phase - b.phase) == pytest.approx(-1.0, abs=1e-12)
    for oracle in (False, True):
        t = s.tables(oracle=oracle)
        assert t["12"][("L", "L")] < 1e-12
        assert t["12p"][("U", "U")] < 1e-12
        assert t["1p2"][("U", "U")] < 1e-12
        assert t["1p2p"][("U", "U")] == pytest.approx(hardy_probability(s), abs=1e-12)
    assert 0.0 <= s.u**2 <= 1.0
    assert 0.0 <= s.hardy_probability <= 0.5


@settings(max_examples=200, deadline=None)
@given(feasible_pairs())
def test_solution_invariants(pair):
    _check_solution(solve_hardy(HardyConfiguration(*pair)))


@settings(max_examples=100, deadline=None)
@given(feasible_pairs(), st.floats(0.05, 1.0))
def test_solution_invariants_with_u_prime(pair, u1p):
    t1p, r2p = pair
    r1p, t2p = math.sqrt(1 - t1p**2), math.sqrt(1 - r2p**2)
    assume(r1p * t2p <= u1p * t1p * r2p)
    _check_solution(solve_hardy(HardyConfiguration(t1p, r2p, u1p=u1p)))


@settings(max_examples=50, deadline=None)
@given(feasible_pairs(), st.floats(-100, 100))
def test_free_phase_does_not_change_probabilities(pair, phi0):
    base = solve_hardy(HardyConfiguration(*pair))
    moved = solve_hardy(HardyConfiguration(*pair, phi0=phi0, n1=3, n2=-1, n3=5))
    for key in ("12", "12p", "1p2", "1p2p"):
        assert moved.tables()[key].isclose(base.tables()[key], atol=1e-12)


def test_boundary_gives_unit_u():
    for theta in np.linspace(0.05, PI / 2 - 0.05, 25):
        s = solve_hardy(HardyConfiguration(math.cos(theta), math.sin(theta)))
        assert s.u ** 2 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("q,expected", [(1.0, 0.5), (math.sqrt(0.5), 0.0), (math.sqrt(0.75), 0.125)])
def test_diagonal_formula(q, expected):
    assert hardy_probability_diagonal(q) == pytest.approx(expected, abs=1e-12)
    assert solve_hardy(HardyConfiguration.diagonal(q)).hardy_probability == pytest.approx(expected, abs=1e-12)


# -- maximisation ------------------------------------------------------------

def test_maximum_full_region():
    best = maximize_hardy(100)
    assert best.probability == pytest.approx(0.5, abs=1e-12)
    assert (best.config.t1p, best.config.r2p) == (1.0, 1.0)


def test_maximum_on_boundary_is_zero():
    assert maximize_hardy(200, region="boundary").probability == pytest.approx(0.0, abs=1e-12)


def test_diagonal_profile_monotone():
    best = maximize_hardy(101, region="diagonal")
    q, p = best.profile.T
    assert np.all(np.diff(p) >= 0.0)
    assert p == pytest.approx(0.5 * (2 * q**2 - 1) ** 2, abs=1e-12)
    assert best.probability == pytest.approx(0.5, abs=1e-12)


def test_maximize_rejects_tiny_grid():
    with pytest.raises(DomainError):
        maximize_hardy(1)


def test_maximize_is_deterministic():
    assert maximize_hardy(37) == maximize_hardy(37)

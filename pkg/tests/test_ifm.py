import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardy_postselect.closed_form import joint_table
from hardy_postselect.errors import (
    ClassificationUnsupportedError,
    DomainError,
    NoInteractionError,
    SingularPointError,
)
from hardy_postselect.events import EventRecord
from hardy_postselect.ifm import (
    SWEEP_COLUMNS,
    EventClass,
    IfmContext,
    classify_event,
    dark_coincidence_prob,
    dark_settings,
    ifm_efficiency,
    sweep,
    sweep_csv,
)
from hardy_postselect.optics import OpticalSetting, oracle_table

unit = st.floats(0.0, 1.0)


@pytest.mark.parametrize("r2", [0.0, 0.3, 0.8, 1.0])
def test_dark_without_object(r2):
    assert dark_coincidence_prob(1.0, r2) == 0.0


def test_fifty_fifty_value():
    assert dark_coincidence_prob(0.0, math.sqrt(0.5)) == pytest.approx(0.25, abs=1e-12)


def test_singular_point_flags_supremum():
    with pytest.raises(SingularPointError) as info:
        dark_coincidence_prob(0.0, 1.0)
    assert info.value.supremum == 0.5


def test_approach_to_half():
    r2 = 1.0 - np.logspace(-1, -8, 30)
    values = [dark_coincidence_prob(0.0, x) for x in r2]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] < 0.5
    assert values[-1] == pytest.approx(0.5, abs=1e-7)


def test_dense_grid_monotone_at_zero_u():
    r2 = np.linspace(0.0, 1.0, 2001)[:-1]
    values = np.array([dark_coincidence_prob(0.0, x) for x in r2])
    assert np.all(np.diff(values) > 0)


@given(unit, unit)
def test_positivity(u, r2):
    try:
        p = dark_coincidence_prob(u, r2)
    except SingularPointError:
        assert u == 0.0 and r2 == 1.0
        return
    if u < 1.0 and 0.0 < r2 < 1.0:
        # positive in exact arithmetic; underflow aside
        assert p >= 0.0
        if (1 - u * u) > 1e-6 and 1e-6 < r2 < 1 - 1e-6:
            assert p > 0.0
    else:
        assert p == 0.0


@pytest.mark.parametrize("u", [0.0, 0.2, 0.5, 0.9, 0.999])
@pytest.mark.parametrize("r2", [0.05, 0.4, math.sqrt(0.5), 0.93])
def test_oracle_agrees(u, r2):
    s1, s2 = dark_settings(u, r2, phase=0.37)
    expected = dark_coincidence_prob(u, r2)
    assert oracle_table(s1, s2)[("L", "L")] == pytest.approx(expected, abs=1e-12)
    assert joint_table(s1, s2)[("L", "L")] == pytest.approx(expected, abs=1e-12)


def test_dark_fringe_without_object():
    s1, s2 = dark_settings(1.0, 0.6)
    assert oracle_table(s1, s2)[("L", "L")] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("u", [0.0, 0.4, 0.8, 1.0])
@pytest.mark.parametrize("r2", [0.2, 0.7])
def test_side1_singles_unchanged(u, r2):
    s1, s2 = dark_settings(min(u, 0.999), r2)
    s2 = OpticalSetting(s2.phase, s2.r, s2.t, u)
    table = joint_table(s1, s2)
    assert table.marginal1("L") == pytest.approx(0.5, abs=1e-12)
    assert table.marginal1("U") == pytest.approx(0.5, abs=1e-12)


def test_efficiency_fifty_fifty():
    rep = ifm_efficiency(0.0, math.sqrt(0.5))
    assert rep.absorption == 0.5
    assert rep.efficiency == pytest.approx(1 / 3, abs=1e-12)
    assert not rep.supremum and not rep.degenerate


def test_efficiency_supremum():
    rep = ifm_efficiency(0.0, 1.0)
    assert rep.supremum and rep.efficiency == 0.5


def test_efficiency_needs_object():
    with pytest.raises(NoInteractionError):
        ifm_efficiency(1.0, 0.5)


def test_efficiency_degenerate_near_unit_u():
    rep = ifm_efficiency(1.0 - 1e-14, 0.5)
    assert rep.degenerate


@given(unit, unit)
def test_efficiency_bounded(u, r2):
    if u == 1.0:
        return
    rep = ifm_efficiency(u, r2)
    assert 0.0 <= rep.efficiency <= 0.5


def test_domain():
    with pytest.raises(DomainError):
        dark_coincidence_prob(1.2, 0.5)
    with pytest.raises(DomainError):
        ifm_efficiency(0.5, -0.1)


def test_sweep_csv():
    rows = sweep([0.0, 0.5, 1.0], [0.5, 1.0])
    text = sweep_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert tuple(parsed[0]) == SWEEP_COLUMNS
    assert len(parsed) == 7
    flags = [r[-1] for r in parsed[1:]]
    assert flags == ["", "supremum", "", "", "degenerate", "degenerate"]
    assert float(parsed[1][2]) == dark_coincidence_prob(0.0, 0.5)
    assert math.isnan(float(parsed[-1][4]))


# -- classification -----------------------------------------------------------

@pytest.fixture
def context():
    s1, s2 = dark_settings(0.2, 0.6)
    return IfmContext(s1, s2)


@pytest.mark.parametrize("o1,o2,expected", [
    ("L", "L", EventClass.CONCLUSIVE),
    ("U", "L", EventClass.INCONCLUSIVE),
    ("L", "U", EventClass.INCONCLUSIVE),
    ("U", "U", EventClass.INCONCLUSIVE),
    ("L", "A", EventClass.DESTRUCTIVE),
    ("U", "A", EventClass.DESTRUCTIVE),
])
def test_classification(context, o1, o2, expected):
    assert classify_event(EventRecord(0, "1p2", o1, o2), context) is expected


def test_wrong_phase_unsupported():
    s1, s2 = dark_settings(0.2, 0.6)
    bad = IfmContext(OpticalSetting(s1.phase + 0.3, s1.r, s1.t), s2)
    with pytest.raises(ClassificationUnsupportedError):
        classify_event(EventRecord(0, "1p2", "L", "L"), bad)


def test_wrong_splitter_unsupported():
    s1, s2 = dark_settings(0.2, 0.6)
    bad = IfmContext(OpticalSetting(s1.phase, 0.6, 0.8), s2)
    with pytest.raises(ClassificationUnsupportedError):
        classify_event(EventRecord(0, "1p2", "L", "L"), bad)


def test_wrong_pair_unsupported(context):
    with pytest.raises(ClassificationUnsupportedError):
        classify_event(EventRecord(0, "12", "L", "L"), context)


def test_object_absent_rules_out_dark_and_absorption():
    s1, s2 = dark_settings(1.0, 0.6)
    ctx = IfmContext(s1, s2, object_present=False)
    assert classify_event(EventRecord(0, "1p2", "U", "L"), ctx) is EventClass.INCONCLUSIVE
    with pytest.raises(DomainError):
        classify_event(EventRecord(0, "1p2", "L", "L"), ctx)


def test_tiny_u_at_unit_r2_is_not_singular():
    assert dark_coincidence_prob(5.5e-55, 1.0) == 0.0

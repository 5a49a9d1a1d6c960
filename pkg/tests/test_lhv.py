import numpy as np
import pytest

from hardy_postselect.errors import DomainError, UndefinedCorrelationError
from hardy_postselect.lhv import (
    DeterministicStrategy,
    LhvMixture,
    ch_margins,
    enumerate_strategies,
    find_postselected_violation,
    postselected_tables,
    strategy_tables,
    verify_ch_total_all,
)


def test_count_and_order():
    strategies = enumerate_strategies()
    assert len(strategies) == 36
    assert len(set(strategies)) == 36
    assert strategies[0] == DeterministicStrategy(("L", "L"), ("L", "L"))
    assert strategies == enumerate_strategies()


def test_invalid_strategy():
    with pytest.raises(DomainError):
        DeterministicStrategy(("A", "L"), ("L", "L"))


def test_all_u_tables():
    tables = strategy_tables(DeterministicStrategy(("U", "U"), ("U", "U")))
    assert all(t[("U", "U")] == 1.0 for t in tables.values())


def test_absorbing_on_phi2():
    tables = strategy_tables(DeterministicStrategy(("L", "U"), ("A", "L")))
    assert tables["12"][("L", "A")] == 1.0
    assert tables["1p2"][("U", "A")] == 1.0
    assert tables["12p"][("L", "L")] == 1.0


@pytest.mark.parametrize("s", enumerate_strategies(), ids=lambda s: s.label)
def test_tables_complete(s):
    for t in strategy_tables(s).values():
        assert t.total == 1.0


def test_vertices_obey_total_inequality():
    audit = verify_ch_total_all()
    assert audit.max_total_margin == 0.0
    assert all(m <= 0.0 for m in audit.total_margins)


def test_hand_evaluated_vertex():
    # o1(Phi1') = U, o2(Phi2') = U, o2(Phi2) = A
    s = DeterministicStrategy(("L", "U"), ("A", "U"))
    post, total = ch_margins(strategy_tables(s))
    assert total == 0.0
    tables = strategy_tables(s)
    assert tables["1p2p"][("U", "U")] == 1.0
    assert tables["12"].marginal2("A") == 1.0


def test_uniform_mixture_is_average():
    audit = verify_ch_total_all()
    _, total = ch_margins(LhvMixture.uniform().tables())
    assert total == pytest.approx(np.mean(audit.total_margins), abs=1e-12)


def test_random_mixtures_linear():
    rng = np.random.default_rng(7)
    audit = verify_ch_total_all()
    for _ in range(20):
        w = rng.dirichlet(np.ones(36))
        post, total = ch_margins(LhvMixture(w).tables())
        assert total == pytest.approx(float(w @ audit.total_margins), abs=1e-12)
        assert post == pytest.approx(float(w @ audit.postselected_margins), abs=1e-12)
        assert total <= 1e-12


def test_stochastic_local_models_are_vertex_mixtures():
    rng = np.random.default_rng(11)
    for _ in range(20):
        side1 = {x: rng.dirichlet(np.ones(2)) for x in ("1", "1p")}
        side2 = {y: rng.dirichlet(np.ones(3)) for y in ("2", "2p")}
        mixture = LhvMixture.from_local_responses(side1, side2)
        tables = mixture.tables()
        for pair, table in tables.items():
            x = "1p" if pair.startswith("1p") else "1"
            y = "2p" if pair.endswith("2p") else "2"
            assert np.allclose(table.values, np.outer(side1[x], side2[y]), atol=1e-12)
        assert ch_margins(tables)[1] <= 1e-12


def test_postselection_exhibit():
    s, report = find_postselected_violation()
    assert s == DeterministicStrategy(("L", "U"), ("A", "U"))
    assert report.lhs == 1.0 and report.rhs == 0.0
    assert report.margin == 1.0
    _, total = ch_margins(strategy_tables(s))
    assert total <= 0.0


def test_only_phi2_absorbing_vertices_break_postselected_bound():
    audit = verify_ch_total_all()
    assert audit.max_postselected_margin == 1.0
    assert audit.postselection_violators
    assert all(s.o2[0] == "A" for s in audit.postselection_violators)
    absorption_free = [s for s in enumerate_strategies() if "A" not in s.o2]
    assert len(absorption_free) == 16
    assert all(ch_margins(strategy_tables(s))[0] <= 0.0 for s in absorption_free)


def test_renormalized_postselection():
    mixture = LhvMixture.uniform().tables()
    renorm = postselected_tables(mixture, renormalize=True)
    assert all(t.total == pytest.approx(1.0) for t in renorm.values())
    with pytest.raises(UndefinedCorrelationError):
        postselected_tables(strategy_tables(DeterministicStrategy(("L", "U"), ("A", "U"))), renormalize=True)


def test_mixture_validation():
    with pytest.raises(DomainError):
        LhvMixture(np.ones(36))

"""Bell-type inequalities evaluated on joint detection tables.

Four families are covered:

* ``CH-postselected``: P(UU|1'2') <= P(LL|12) + P(UU|12') + P(UU|1'2), the
  Hardy form of the Clauser-Horne inequality, which only sees the
  subensemble where photon 2 is not absorbed.
* ``CH-total``: the same with P(A2|Phi2) added on the right; it holds for any
  local model once absorbed events are counted.
* ``CH-simplified``: the total inequality divided through under the Hardy
  conditions, ``(u' t1' r2')**2 (1 - u**2) <= 1``.
* ``CHSH``: |E12 + E12' + E1'2 - E1'2'| <= 2 with optional per-table
  renormalisation over non-absorbed events.

Every report keeps the raw margin ``lhs - rhs``; ``violated`` uses an
absolute tolerance of 1e-12.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import DomainError, UndefinedCorrelationError
from .optics import JointProbabilityTable

VIOLATION_TOL = 1e-12
CHSH_BOUND = 2.0

# Detector values used in correlation functions.
OUTCOME_VALUE = {"L": -1, "U": +1}

CH_POSTSELECTED = "CH-postselected"
CH_TOTAL = "CH-total"
CH_SIMPLIFIED = "CH-simplified"
CHSH = "CHSH"


@dataclass(frozen=True)
class Term:
    label: str
    value: float
    source: str = "input"

    def to_dict(self) -> dict:
        return {"label": self.label, "value": self.value, "source": self.source}


@dataclass(frozen=True)
class InequalityReport:
    inequality: str
    lhs: float
    rhs: float
    terms: Tuple[Term, ...] = ()
    stderr: Optional[float] = None

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def violated(self) -> bool:
        return self.margin > VIOLATION_TOL

    def interval(self, k: float = 4.0) -> Optional[Tuple[float, float]]:
        """``margin +- k * stderr`` when a standard error is attached."""
        if self.stderr is None:
            return None
        return (self.margin - k * self.stderr, self.margin + k * self.stderr)

    def to_dict(self) -> dict:
        out = {
            "inequality": self.inequality,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "violated": self.violated,
            "terms": [t.to_dict() for t in self.terms],
        }
        if self.stderr is not None:
            out["stderr"] = self.stderr
            out["interval_4sigma"] = list(self.interval())
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _prob(label: str, value: float) -> float:
    if math.isnan(value) or value < -VIOLATION_TOL or value > 1.0 + VIOLATION_TOL:
        raise DomainError(f"{label}={value!r} is not a probability")
    return float(value)


CH_LABELS = (
    "P(U1,Phi1';U2,Phi2')",
    "P(L1,Phi1;L2,Phi2)",
    "P(U1,Phi1;U2,Phi2')",
    "P(U1,Phi1';U2,Phi2)",
)
ABS_LABEL = "P(A2,Phi2)"


def ch_postselected(p_uu_primed: float, p_ll: float, p_uu_12p: float, p_uu_1p2: float,
                    source: str = "input") -> InequalityReport:
    values = [_prob(lbl, v) for lbl, v in zip(CH_LABELS, (p_uu_primed, p_ll, p_uu_12p, p_uu_1p2))]
    terms = tuple(Term(lbl, v, source) for lbl, v in zip(CH_LABELS, values))
    return InequalityReport(CH_POSTSELECTED, values[0], values[1] + values[2] + values[3], terms)


def ch_total(p_uu_primed: float, p_ll: float, p_uu_12p: float, p_uu_1p2: float, p_abs: float,
             source: str = "input") -> InequalityReport:
    post = ch_postselected(p_uu_primed, p_ll, p_uu_12p, p_uu_1p2, source)
    p_abs = _prob(ABS_LABEL, p_abs)
    return InequalityReport(CH_TOTAL, post.lhs, post.rhs + p_abs, post.terms + (Term(ABS_LABEL, p_abs, source),))


def ch_simplified_bound(u1p: float, t1p: float, r2p: float, u: float) -> InequalityReport:
    """``(u' t1' r2')**2 (1 - u**2) <= 1``; the parameters should obey the Hardy relations."""
    if abs(u * u - 1.0) <= VIOLATION_TOL:
        raise DomainError("u^2 = 1: the simplified bound divides by 1 - u^2")
    lhs = (u1p * t1p * r2p) ** 2 * (1.0 - u * u)
    terms = (Term("u'", u1p, "parameter"), Term("t1'", t1p, "parameter"),
             Term("r2'", r2p, "parameter"), Term("u", u, "parameter"))
    return InequalityReport(CH_SIMPLIFIED, lhs, 1.0, terms)


TableSet = Union[Mapping[str, JointProbabilityTable], Sequence[JointProbabilityTable]]
PAIR_KEYS = ("12", "12p", "1p2", "1p2p")


def _as_mapping(tables: TableSet) -> Dict[str, JointProbabilityTable]:
    if isinstance(tables, Mapping):
        missing = [k for k in PAIR_KEYS if k not in tables]
        if missing:
            raise DomainError(f"missing tables for setting pairs {missing}")
        return {k: tables[k] for k in PAIR_KEYS}
    tables = list(tables)
    if len(tables) != 4:
        raise DomainError(f"need four tables, got {len(tables)}")
    return dict(zip(PAIR_KEYS, tables))


def hardy_terms(tables: TableSet) -> Dict[str, float]:
    """Pull the five probabilities used by the CH inequalities out of four tables."""
    t = _as_mapping(tables)
    return {
        "p_uu_primed": t["1p2p"][("U", "U")],
        "p_ll": t["12"][("L", "L")],
        "p_uu_12p": t["12p"][("U", "U")],
        "p_uu_1p2": t["1p2"][("U", "U")],
        "p_abs": t["12"].marginal2("A"),
    }


def ch_reports(tables: TableSet, source: str = "quantum") -> Tuple[InequalityReport, InequalityReport]:
    """Postselected and full-ensemble CH reports for one set of tables."""
    p = hardy_terms(tables)
    abs_ = p.pop("p_abs")
    return ch_postselected(**p, source=source), ch_total(**p, p_abs=abs_, source=source)


@dataclass(frozen=True)
class CorrelationSet:
    e12: float
    e12p: float
    e1p2: float
    e1p2p: float
    normalised: bool

    def __post_init__(self):
        if self.normalised:
            for v in self.values:
                if abs(v) > 1.0 + VIOLATION_TOL:
                    raise DomainError(f"normalised correlation {v!r} outside [-1, 1]")

    @property
    def values(self) -> Tuple[float, float, float, float]:
        return (self.e12, self.e12p, self.e1p2, self.e1p2p)

    @property
    def chsh_sum(self) -> float:
        return self.e12 + self.e12p + self.e1p2 - self.e1p2p

    def to_dict(self) -> dict:
        return {"E12": self.e12, "E12p": self.e12p, "E1p2": self.e1p2, "E1p2p": self.e1p2p,
                "normalised": self.normalised}


def correlation(table: JointProbabilityTable, normalised: bool = False) -> float:
    """Expectation of the product of detector values over non-absorbed events."""
    e = 0.0
    mass = 0.0
    for o1 in ("L", "U"):
        for o2 in ("L", "U"):
            p = table[(o1, o2)]
            e += OUTCOME_VALUE[o1] * OUTCOME_VALUE[o2] * p
            mass += p
    if normalised:
        if mass <= 0.0:
            raise UndefinedCorrelationError("no non-absorbed events to normalise over")
        e /= mass
    return e


def chsh(tables: TableSet, normalised: bool = False) -> Tuple[CorrelationSet, InequalityReport]:
    t = _as_mapping(tables)
    es = CorrelationSet(*(correlation(t[k], normalised) for k in PAIR_KEYS), normalised=normalised)
    source = "normalised" if normalised else "unnormalised"
    terms = tuple(Term(f"E({k})", v, source) for k, v in zip(PAIR_KEYS, es.values))
    return es, InequalityReport(CHSH, abs(es.chsh_sum), CHSH_BOUND, terms)


def audit_tables(tables: TableSet, source: str = "quantum",
                 simplified: Optional[Tuple[float, float, float, float]] = None) -> Dict[str, InequalityReport]:
    """Every inequality family on one set of tables.

    ``simplified`` optionally carries ``(u', t1', r2', u)`` for the simplified
    CH bound, which is skipped when ``u**2 == 1``.
    """
    post, total = ch_reports(tables, source)
    out = {CH_POSTSELECTED: post, CH_TOTAL: total}
    if simplified is not None and abs(simplified[3] ** 2 - 1.0) > VIOLATION_TOL:
        out[CH_SIMPLIFIED] = ch_simplified_bound(*simplified)
    out["CHSH-unnormalised"] = chsh(tables, normalised=False)[1]
    out["CHSH-normalised"] = chsh(tables, normalised=True)[1]
    return out


def audit_solution(solution, oracle: bool = False) -> Dict[str, InequalityReport]:
    c = solution.config
    return audit_tables(
        solution.tables(oracle=oracle),
        source="oracle" if oracle else "closed-form",
        simplified=(c.u1p, c.t1p, c.r2p, solution.u),
    )

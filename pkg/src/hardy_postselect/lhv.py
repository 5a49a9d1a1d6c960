"""Deterministic local strategies for the four-setting, 2 x 3 outcome scenario.

Side 1 answers L or U for each of Phi1, Phi1'; side 2 answers L, U or A for
each of Phi2, Phi2'.  That gives 2*2*3*3 = 36 vertices.  Any stochastic local
model (a hidden state that fixes factorising response probabilities) is a
convex mixture of these vertices, and every quantity checked here is linear
in the tables, so checking the vertices settles every local model.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from . import bell
from .errors import DomainError, UndefinedCorrelationError
from .optics import SIDE1, SIDE2, JointProbabilityTable

SIDE1_SETTINGS = ("1", "1p")
SIDE2_SETTINGS = ("2", "2p")
PAIR_KEYS = ("12", "12p", "1p2", "1p2p")


def _split(pair: str) -> Tuple[str, str]:
    return ("1p" if pair.startswith("1p") else "1"), ("2p" if pair.endswith("2p") else "2")


@dataclass(frozen=True)
class DeterministicStrategy:
    """Outcomes ``o1 = (o1(Phi1), o1(Phi1'))`` and ``o2 = (o2(Phi2), o2(Phi2'))``."""

    o1: Tuple[str, str]
    o2: Tuple[str, str]

    def __post_init__(self):
        if len(self.o1) != 2 or any(o not in SIDE1 for o in self.o1):
            raise DomainError(f"side-1 outcomes must be L/U, got {self.o1!r}")
        if len(self.o2) != 2 or any(o not in SIDE2 for o in self.o2):
            raise DomainError(f"side-2 outcomes must be L/U/A, got {self.o2!r}")

    def side1(self, setting: str) -> str:
        return self.o1[SIDE1_SETTINGS.index(setting)]

    def side2(self, setting: str) -> str:
        return self.o2[SIDE2_SETTINGS.index(setting)]

    @property
    def label(self) -> str:
        return "".join(self.o1) + "|" + "".join(self.o2)

    def to_dict(self) -> dict:
        return {"Phi1": self.o1[0], "Phi1p": self.o1[1], "Phi2": self.o2[0], "Phi2p": self.o2[1]}


def enumerate_strategies() -> List[DeterministicStrategy]:
    """All 36 vertices, ordered lexicographically with L < U < A."""
    return [
        DeterministicStrategy((a, b), (c, d))
        for a, b, c, d in itertools.product(SIDE1, SIDE1, SIDE2, SIDE2)
    ]


def strategy_tables(s: DeterministicStrategy) -> Dict[str, JointProbabilityTable]:
    out = {}
    for pair in PAIR_KEYS:
        x, y = _split(pair)
        out[pair] = JointProbabilityTable.point_mass(s.side1(x), s.side2(y))
    return out


@dataclass(frozen=True)
class LhvMixture:
    """Convex weights over :func:`enumerate_strategies`."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (36,):
            raise DomainError(f"need 36 weights, got shape {w.shape}")
        if np.any(w < 0.0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls) -> "LhvMixture":
        return cls(np.full(36, 1.0 / 36))

    @classmethod
    def from_local_responses(cls, side1: Mapping[str, Sequence[float]],
                             side2: Mapping[str, Sequence[float]]) -> "LhvMixture":
        """Vertex weights of a single hidden state with stochastic local responses.

        ``side1[x]`` gives (P(L), P(U)) under setting ``x`` in ``("1", "1p")``,
        ``side2[y]`` gives (P(L), P(U), P(A)) under ``y`` in ``("2", "2p")``.
        """
        weights = []
        for s in enumerate_strategies():
            w = 1.0
            for x in SIDE1_SETTINGS:
                w *= side1[x][SIDE1.index(s.side1(x))]
            for y in SIDE2_SETTINGS:
                w *= side2[y][SIDE2.index(s.side2(y))]
            weights.append(w)
        return cls(np.array(weights))

    def tables(self) -> Dict[str, JointProbabilityTable]:
        strategies = enumerate_strategies()
        out = {}
        for pair in PAIR_KEYS:
            acc = np.zeros((2, 3))
            for w, s in zip(self.weights, strategies):
                if w:
                    acc += w * strategy_tables(s)[pair].values
            out[pair] = JointProbabilityTable(acc)
        return out


def postselected_tables(tables: Mapping[str, JointProbabilityTable],
                        renormalize: bool = False) -> Dict[str, JointProbabilityTable]:
    """Drop absorbed events.

    By default the surviving entries keep their raw weight relative to all
    emitted pairs; ``renormalize=True`` rescales each table to unit mass.
    """
    out = {}
    for pair, table in tables.items():
        values = table.values.copy()
        values[:, SIDE2.index("A")] = 0.0
        if renormalize:
            mass = values.sum()
            if mass <= 0.0:
                raise UndefinedCorrelationError(f"table {pair} has no non-absorbed events")
            values /= mass
        out[pair] = JointProbabilityTable(values)
    return out


@dataclass(frozen=True)
class VertexAudit:
    strategies: Tuple[DeterministicStrategy, ...]
    total_margins: Tuple[float, ...]
    postselected_margins: Tuple[float, ...]

    @property
    def max_total_margin(self) -> float:
        return max(self.total_margins)

    @property
    def max_postselected_margin(self) -> float:
        return max(self.postselected_margins)

    @property
    def postselection_violators(self) -> List[DeterministicStrategy]:
        return [s for s, m in zip(self.strategies, self.postselected_margins) if m > bell.VIOLATION_TOL]

    def to_dict(self) -> dict:
        return {
            "count": len(self.strategies),
            "max_ch_total_margin": self.max_total_margin,
            "max_ch_postselected_margin": self.max_postselected_margin,
            "vertices": [
                {"strategy": s.to_dict(), "ch_total_margin": t, "ch_postselected_margin": p}
                for s, t, p in zip(self.strategies, self.total_margins, self.postselected_margins)
            ],
        }


def ch_margins(tables: Mapping[str, JointProbabilityTable]) -> Tuple[float, float]:
    """(postselected CH margin on the A-discarded tables, CH-total margin)."""
    post, _ = bell.ch_reports(postselected_tables(tables), source="lhv")
    _, total = bell.ch_reports(tables, source="lhv")
    return post.margin, total.margin


def verify_ch_total_all(strategies: Sequence[DeterministicStrategy] | None = None) -> VertexAudit:
    if strategies is None:
        strategies = enumerate_strategies()
    totals, posts = [], []
    for s in strategies:
        post, total = ch_margins(strategy_tables(s))
        totals.append(total)
        posts.append(post)
    return VertexAudit(tuple(strategies), tuple(totals), tuple(posts))


def find_postselected_violation() -> Tuple[DeterministicStrategy, bell.InequalityReport]:
    """First vertex (canonical order) whose postselected statistics break the CH bound."""
    best = None
    for s in enumerate_strategies():
        report, _ = bell.ch_reports(postselected_tables(strategy_tables(s)), source="lhv-postselected")
        if best is None or report.margin > best[1].margin:
            best = (s, report)
    return best

"""Seeded Monte Carlo of coincidence records and their postselected analysis.

Randomness comes from numpy's Philox-4x64-10 counter-based generator keyed by
the seed.  Trial ``k`` consumes the two doubles at stream positions ``2k`` and
``2k + 1`` (setting choice, then outcome), so any block of trials can be
regenerated on its own by advancing the counter; results do not depend on how
the trials are chunked.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from . import bell
from .errors import CoverageError, DomainError, InsufficientDataError
from .optics import OUTCOME_PAIRS, SIDE1, SIDE2, JointProbabilityTable

RNG_ALGORITHM = "numpy.random.Philox-4x64-10"
PAIR_KEYS = ("12", "12p", "1p2", "1p2p")
CSV_COLUMNS = ("trial", "pair", "o1", "o2")
DEFAULT_CHUNK = 1 << 18

_DOUBLES_PER_TRIAL = 2
_DOUBLES_PER_COUNTER = 4  # Philox-4x64 emits four 64-bit words per counter step


class EventRecord(NamedTuple):
    trial: int
    pair: str
    o1: str
    o2: str


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise DomainError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def trial_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform draws for trials ``start .. start+count-1``, shape ``(count, 2)``."""
    seed = _check_seed(seed)
    first = start * _DOUBLES_PER_TRIAL
    skip, offset = divmod(first, _DOUBLES_PER_COUNTER)
    bitgen = np.random.Philox(key=seed)
    if skip:
        bitgen.advance(skip)
    draws = np.random.Generator(bitgen).random(offset + count * _DOUBLES_PER_TRIAL)
    return draws[offset:].reshape(count, _DOUBLES_PER_TRIAL)


def _inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(probs)
    idx = np.searchsorted(cum / cum[-1], u, side="right")
    # guard against u landing past the last rounded cumulative value
    last = int(np.flatnonzero(probs > 0.0)[-1])
    return np.minimum(idx, last)


@dataclass(frozen=True, eq=False)
class EventLog:
    """Columnar event records plus the inputs that reproduce them."""

    trial: np.ndarray
    pair: np.ndarray
    o1: np.ndarray
    o2: np.ndarray
    seed: int
    weights: Tuple[float, float, float, float]
    rng: str = RNG_ALGORITHM

    def __len__(self) -> int:
        return len(self.trial)

    def __iter__(self) -> Iterator[EventRecord]:
        for k, p, a, b in zip(self.trial.tolist(), self.pair.tolist(), self.o1.tolist(), self.o2.tolist()):
            yield EventRecord(k, PAIR_KEYS[p], SIDE1[a], SIDE2[b])

    def metadata(self) -> dict:
        return {"n": len(self), "seed": self.seed, "rng": self.rng, "weights": list(self.weights)}

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        pairs = np.array(PAIR_KEYS)[self.pair]
        o1 = np.array([o + "1" for o in SIDE1])[self.o1]
        o2 = np.array([o + "2" for o in SIDE2])[self.o2]
        writer.writerows(zip(self.trial.tolist(), pairs.tolist(), o1.tolist(), o2.tolist()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


TableSource = Union["HardySolution", Mapping[str, JointProbabilityTable]]  # noqa: F821


def _source_tables(source) -> Dict[str, JointProbabilityTable]:
    tables = source.tables() if hasattr(source, "tables") else dict(source)
    missing = [k for k in PAIR_KEYS if k not in tables]
    if missing:
        raise DomainError(f"tables missing for setting pairs {missing}")
    for k in PAIR_KEYS:
        tables[k].validate(1e-9)
    return tables


def sample_events(source: TableSource, n: int, seed: int,
                  weights: Sequence[float] = (1.0, 1.0, 1.0, 1.0),
                  chunk_size: int = DEFAULT_CHUNK) -> EventLog:
    """Draw ``n`` trials: a setting pair by ``weights``, then a joint outcome from its table.

    ``source`` is a :class:`~hardy_postselect.hardy.HardySolution` or a mapping
    from setting-pair key to table (e.g. a local strategy).
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"number of trials must be >= 1, got {n!r}")
    seed = _check_seed(seed)
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,) or np.any(~np.isfinite(w)) or np.any(w < 0.0) or w.sum() <= 0.0:
        raise DomainError(f"setting weights must be four nonnegative numbers with positive sum, got {weights!r}")
    if chunk_size < 1:
        raise DomainError("chunk_size must be positive")
    tables = _source_tables(source)
    flat = [tables[k].values.ravel() for k in PAIR_KEYS]

    pair = np.empty(n, dtype=np.int8)
    outcome = np.empty(n, dtype=np.int8)
    for start in range(0, n, chunk_size):
        count = min(chunk_size, n - start)
        u = trial_uniforms(seed, start, count)
        p = _inverse_cdf(w, u[:, 0])
        o = np.empty(count, dtype=np.int64)
        for k in range(4):
            mask = p == k
            if mask.any():
                o[mask] = _inverse_cdf(flat[k], u[mask, 1])
        pair[start:start + count] = p
        outcome[start:start + count] = o
    o1, o2 = np.divmod(outcome, len(SIDE2))
    return EventLog(
        trial=np.arange(n, dtype=np.int64),
        pair=pair,
        o1=o1.astype(np.int8),
        o2=o2.astype(np.int8),
        seed=seed,
        weights=tuple(float(x) for x in w),
    )


@dataclass(frozen=True, eq=False)
class EmpiricalEstimate:
    pair: str
    trials: int
    counts: np.ndarray
    postselected: bool

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.trials

    @property
    def stderr(self) -> np.ndarray:
        p = self.frequencies
        return np.sqrt(p * (1.0 - p) / self.trials)

    def table(self) -> JointProbabilityTable:
        return JointProbabilityTable(self.frequencies)

    def frequency(self, o1: str, o2: str) -> float:
        return float(self.frequencies[SIDE1.index(o1), SIDE2.index(o2)])

    def to_dict(self) -> dict:
        f, se = self.frequencies, self.stderr
        return {
            "pair": self.pair,
            "trials": self.trials,
            "postselected": self.postselected,
            "counts": {f"{a}1,{b}2": int(self.counts[i, j]) for i, a in enumerate(SIDE1) for j, b in enumerate(SIDE2)},
            "frequencies": {f"{a}1,{b}2": float(f[i, j]) for i, a in enumerate(SIDE1) for j, b in enumerate(SIDE2)},
            "stderr": {f"{a}1,{b}2": float(se[i, j]) for i, a in enumerate(SIDE1) for j, b in enumerate(SIDE2)},
        }


def estimate(log: EventLog, postselect: bool = False,
             pairs: Optional[Sequence[str]] = None) -> Dict[str, EmpiricalEstimate]:
    """Count outcomes per setting pair.

    With ``postselect`` the absorbed records are discarded, but frequencies
    stay relative to every trial of the pair (no renormalisation).
    """
    if len(log) == 0:
        raise InsufficientDataError("event log is empty")
    present = np.bincount(log.pair, minlength=4)
    if pairs is None:
        pairs = [k for i, k in enumerate(PAIR_KEYS) if present[i]]
    out = {}
    for key in pairs:
        if key not in PAIR_KEYS:
            raise DomainError(f"unknown setting pair {key!r}")
        i = PAIR_KEYS.index(key)
        if present[i] == 0:
            raise InsufficientDataError(f"no events for setting pair {key}")
        mask = log.pair == i
        counts = np.bincount(log.o1[mask] * len(SIDE2) + log.o2[mask], minlength=6).reshape(2, 3)
        if postselect:
            counts[:, SIDE2.index("A")] = 0
        out[key] = EmpiricalEstimate(key, int(present[i]), counts, postselect)
    return out


def empirical_tables(log: EventLog, postselect: bool = False) -> Dict[str, JointProbabilityTable]:
    return {k: e.table() for k, e in estimate(log, postselect, PAIR_KEYS).items()}


def _linear_margin(estimates: Mapping[str, EmpiricalEstimate],
                   coefficients: Mapping[str, Sequence[Tuple[Tuple[str, str], float]]]) -> Tuple[float, float]:
    """Value and standard error of a signed sum of cell frequencies (multinomial per pair)."""
    value = 0.0
    var = 0.0
    for key, cells in coefficients.items():
        est = estimates[key]
        c = np.zeros((2, 3))
        for (o1, o2), coef in cells:
            c[SIDE1.index(o1), SIDE2.index(o2)] += coef
        p = est.frequencies
        mean = float((c * p).sum())
        value += mean
        var += (float((c * c * p).sum()) - mean * mean) / est.trials
    return value, math.sqrt(max(var, 0.0))


_CH_CELLS = {
    "1p2p": [(("U", "U"), 1.0)],
    "12": [(("L", "L"), -1.0)],
    "12p": [(("U", "U"), -1.0)],
    "1p2": [(("U", "U"), -1.0)],
}


def empirical_audit(log: EventLog) -> Tuple[bell.InequalityReport, bell.InequalityReport]:
    """Postselected CH and full-ensemble CH-total with standard errors."""
    present = set(np.unique(log.pair).tolist()) if len(log) else set()
    missing = [k for i, k in enumerate(PAIR_KEYS) if i not in present]
    if missing:
        raise CoverageError(f"event log lacks setting pairs {missing}")

    post_est = estimate(log, postselect=True, pairs=PAIR_KEYS)
    full_est = estimate(log, postselect=False, pairs=PAIR_KEYS)

    post_tables = {k: e.table() for k, e in post_est.items()}
    full_tables = {k: e.table() for k, e in full_est.items()}
    post, _ = bell.ch_reports(post_tables, source="empirical-postselected")
    _, total = bell.ch_reports(full_tables, source="empirical")

    _, post_se = _linear_margin(post_est, _CH_CELLS)
    total_cells = dict(_CH_CELLS)
    total_cells["12"] = _CH_CELLS["12"] + [(("L", "A"), -1.0), (("U", "A"), -1.0)]
    _, total_se = _linear_margin(full_est, total_cells)
    return (
        bell.InequalityReport(post.inequality, post.lhs, post.rhs, post.terms, stderr=post_se),
        bell.InequalityReport(total.inequality, total.lhs, total.rhs, total.terms, stderr=total_se),
    )


def summary(log: EventLog) -> dict:
    """JSON-ready digest: counts, margins with 4-sigma intervals, CHSH and RNG metadata."""
    post, total = empirical_audit(log)
    full = estimate(log, postselect=False, pairs=PAIR_KEYS)
    tables = {k: e.table() for k, e in full.items()}
    out = {
        "metadata": log.metadata(),
        "estimates": {k: e.to_dict() for k, e in full.items()},
        "acceptance_rate": {k: 1.0 - float(e.frequencies[:, SIDE2.index("A")].sum()) for k, e in full.items()},
        "ch_postselected": post.to_dict(),
        "ch_total": total.to_dict(),
        "chsh_unnormalised": bell.chsh(tables, normalised=False)[1].to_dict(),
    }
    try:
        out["chsh_normalised"] = bell.chsh(tables, normalised=True)[1].to_dict()
    except ZeroDivisionError:
        out["chsh_normalised"] = None
    return out


def summary_json(log: EventLog) -> str:
    return json.dumps(summary(log), indent=2)

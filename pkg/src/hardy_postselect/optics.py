"""Amplitude-level propagation through the two-photon interferometer.

The source emits ``(|A>_1 |C>_2 + |D>_1 |B>_2) / sqrt(2)``.  Photon 1 travels
beams A and D, photon 2 beams B and C.  Every beam hits one mirror (factor
``i``); beam A carries the phase shifter ``phi_1`` and beam B the partially
absorbing phase shifter ``u * exp(i phi_2)`` whose absorption amplitude is
``v = sqrt(1 - u**2)``.  The beams recombine on symmetric beam splitters::

    H1:  A -> t1 L1 + i r1 U1        D -> i r1 L1 + t1 U1
    H2:  B -> t2 L2 + i r2 U2        C -> i r2 L2 + t2 U2

This routing is fixed so that the resulting probabilities coincide with the
closed forms in :mod:`hardy_postselect.closed_form`.  Nothing here uses those
closed forms; the propagation is done mode by mode on a sparse two-photon
state so the two modules can cross-check each other.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

import numpy as np

from .errors import DomainError, NormalizationError

SIDE1 = ("L", "U")
SIDE2 = ("L", "U", "A")
OUTCOME_PAIRS = tuple((a, b) for a in SIDE1 for b in SIDE2)

UNIT_TOL = 1e-12
NORM_TOL = 1e-9


def _check_unit(name: str, value: float) -> None:
    if not (-UNIT_TOL <= value <= 1.0 + UNIT_TOL) or math.isnan(value):
        raise DomainError(f"{name}={value!r} outside [0, 1]")


@dataclass(frozen=True)
class OpticalSetting:
    """Local knobs of one side of the interferometer.

    ``u`` is the transmission amplitude of the absorber in beam B; it only
    exists on side 2 and must stay 1 for side 1.
    """

    phase: float
    r: float
    t: float
    u: float = 1.0

    def __post_init__(self):
        _check_unit("r", self.r)
        _check_unit("t", self.t)
        _check_unit("u", self.u)
        if abs(self.r**2 + self.t**2 - 1.0) > UNIT_TOL:
            raise DomainError(
                f"beam splitter not lossless: r^2 + t^2 = {self.r**2 + self.t**2!r}"
            )
        if not math.isfinite(self.phase):
            raise DomainError(f"phase must be finite, got {self.phase!r}")

    @classmethod
    def from_reflectivity(cls, phase: float, r: float, u: float = 1.0) -> "OpticalSetting":
        _check_unit("r", r)
        r = min(max(r, 0.0), 1.0)
        return cls(phase, r, math.sqrt(1.0 - r * r), u)

    @property
    def v(self) -> float:
        """Absorption amplitude, taken real and nonnegative."""
        return math.sqrt(max(0.0, 1.0 - self.u * self.u))

    def to_dict(self) -> dict:
        return {"phase": self.phase, "r": self.r, "t": self.t, "u": self.u}

    @classmethod
    def from_dict(cls, data: dict) -> "OpticalSetting":
        return cls(float(data["phase"]), float(data["r"]), float(data["t"]), float(data.get("u", 1.0)))


def _check_pair(pair: Tuple[str, str]) -> Tuple[int, int]:
    try:
        o1, o2 = pair
        return SIDE1.index(o1), SIDE2.index(o2)
    except ValueError:
        raise DomainError(f"unknown outcome pair {pair!r}") from None


class _Table:
    """Shared indexing for 2 x 3 outcome tables (rows L1/U1, columns L2/U2/A2)."""

    values: np.ndarray

    def __getitem__(self, pair):
        i, j = _check_pair(pair)
        return self.values[i, j].item()

    def items(self) -> Iterator[Tuple[Tuple[str, str], complex]]:
        for pair in OUTCOME_PAIRS:
            yield pair, self[pair]


@dataclass(frozen=True, eq=False)
class OutcomeAmplitudeTable(_Table):
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (2, 3):
            raise DomainError(f"amplitude table must be 2x3, got {self.values.shape}")

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


@dataclass(frozen=True, eq=False)
class JointProbabilityTable(_Table):
    """Probabilities over {L1, U1} x {L2, U2, A2} for one setting pair.

    Tables produced by postselection keep their raw (unrenormalized) mass, so
    only nonnegativity is enforced on construction; :meth:`validate` checks
    completeness.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (2, 3):
            raise DomainError(f"probability table must be 2x3, got {values.shape}")
        if np.any(values < -UNIT_TOL) or np.any(values > 1.0 + UNIT_TOL):
            raise DomainError(f"probabilities outside [0, 1]: {values.tolist()}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, probs: Dict[Tuple[str, str], float]) -> "JointProbabilityTable":
        values = np.zeros((2, 3))
        for pair, p in probs.items():
            i, j = _check_pair(pair)
            values[i, j] = p
        return cls(values)

    @classmethod
    def point_mass(cls, o1: str, o2: str) -> "JointProbabilityTable":
        return cls.from_mapping({(o1, o2): 1.0})

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def marginal1(self, o1: str) -> float:
        return float(self.values[SIDE1.index(o1)].sum())

    def marginal2(self, o2: str) -> float:
        return float(self.values[:, SIDE2.index(o2)].sum())

    @property
    def marginals(self) -> Dict[str, float]:
        out = {f"{o}1": self.marginal1(o) for o in SIDE1}
        out.update({f"{o}2": self.marginal2(o) for o in SIDE2})
        return out

    def validate(self, tol: float = UNIT_TOL) -> "JointProbabilityTable":
        if abs(self.total - 1.0) > tol:
            raise NormalizationError(f"table sums to {self.total!r}, expected 1")
        return self

    def isclose(self, other: "JointProbabilityTable", atol: float = UNIT_TOL) -> bool:
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    def to_dict(self) -> dict:
        return {f"{a}1,{b}2": self[(a, b)] for a, b in OUTCOME_PAIRS}


# Sparse single-photon optics.  A photon state is a list of (mode, amplitude);
# each element maps a mode to such a list.

_Mode = str
_Branch = List[Tuple[_Mode, complex]]


def _mirror(mode: _Mode) -> _Branch:
    return [(mode, 1j)]


def _side1_shifter(phase: float):
    def apply(mode: _Mode) -> _Branch:
        if mode == "A":
            return [("A", cmath.exp(1j * phase))]
        return [(mode, 1.0)]

    return apply


def _side2_shifter(phase: float, u: float, v: float):
    def apply(mode: _Mode) -> _Branch:
        if mode == "B":
            out = [("B", u * cmath.exp(1j * phase))]
            if v:
                out.append(("PS*", v))
            return out
        return [(mode, 1.0)]

    return apply


def _splitter(transmitted_in: _Mode, reflected_in: _Mode, lower: _Mode, upper: _Mode, r: float, t: float):
    def apply(mode: _Mode) -> _Branch:
        if mode == transmitted_in:
            return [(lower, t), (upper, 1j * r)]
        if mode == reflected_in:
            return [(lower, 1j * r), (upper, t)]
        return [(mode, 1.0)]

    return apply


def _evolve(state: Dict[Tuple[_Mode, _Mode], complex], element, photon: int):
    out: Dict[Tuple[_Mode, _Mode], complex] = {}
    for modes, amp in state.items():
        for new_mode, factor in element(modes[photon]):
            key = (new_mode, modes[1]) if photon == 0 else (modes[0], new_mode)
            out[key] = out.get(key, 0.0) + amp * factor
    return out


_DETECTOR = {"L1": "L", "U1": "U", "L2": "L", "U2": "U", "PS*": "A"}


def propagate_amplitudes(setting1: OpticalSetting, setting2: OpticalSetting) -> OutcomeAmplitudeTable:
    """Push the entangled pair through mirrors, shifters, absorber and splitters."""
    if abs(setting1.u - 1.0) > UNIT_TOL:
        raise DomainError("side 1 has no absorber; its u must be 1")

    s = 1.0 / math.sqrt(2.0)
    state = {("A", "C"): s, ("D", "B"): s}
    side1 = [
        _mirror,
        _side1_shifter(setting1.phase),
        _splitter("A", "D", "L1", "U1", setting1.r, setting1.t),
    ]
    side2 = [
        _mirror,
        _side2_shifter(setting2.phase, setting2.u, setting2.v),
        _splitter("B", "C", "L2", "U2", setting2.r, setting2.t),
    ]
    for element in side1:
        state = _evolve(state, element, 0)
    for element in side2:
        state = _evolve(state, element, 1)

    values = np.zeros((2, 3), dtype=complex)
    for (m1, m2), amp in state.items():
        values[SIDE1.index(_DETECTOR[m1]), SIDE2.index(_DETECTOR[m2])] += amp
    return OutcomeAmplitudeTable(values)


def outcome_probabilities(amps: OutcomeAmplitudeTable) -> JointProbabilityTable:
    """Born rule on an amplitude table."""
    norm = amps.norm
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"amplitude table has squared norm {norm!r}")
    return JointProbabilityTable(np.abs(amps.values) ** 2)


def oracle_table(setting1: OpticalSetting, setting2: OpticalSetting) -> JointProbabilityTable:
    return outcome_probabilities(propagate_amplitudes(setting1, setting2))

"""Interaction-free detection of the absorber in beam B.

Run the set-up in (Phi1', Phi2) with ``phi1' - phi2`` an odd multiple of pi
and ``u t1' r2 = r1' t2``.  Without the object (u = 1) the coincidence
(L1, L2) is dark; with it, that coincidence appears with probability

    1/2 * (1 - r2^2) r2^2 (1 - u^2)^2 / (1 - r2^2 (1 - u^2))

and reveals the object without a photon having been absorbed.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .errors import ClassificationUnsupportedError, DomainError, NoInteractionError, SingularPointError
from .optics import OpticalSetting

TOL = 1e-12
SUPREMUM = 0.5
SWEEP_COLUMNS = ("u", "r2", "p_dark", "p_abs", "eta", "flag")


def _check(u: float, r2: float) -> None:
    for name, value in (("u", u), ("r2", r2)):
        if not (0.0 <= value <= 1.0):
            raise DomainError(f"{name}={value!r} outside [0, 1]")


def dark_coincidence_prob(u: float, r2: float) -> float:
    """P(L1,Phi1'; L2,Phi2) on the dark-fringe family.

    At ``u = 0, r2 = 1`` the expression is 0/0; a :class:`SingularPointError`
    carrying the supremum 1/2 is raised instead of a number.
    """
    _check(u, r2)
    v2 = 1.0 - u * u
    r2sq = r2 * r2
    # 1 - r2^2 (1 - u^2) without the cancellation near r2 = 1, u -> 0
    den = (1.0 - r2sq) + r2sq * u * u
    if den <= 0.0:
        raise SingularPointError("u = 0 and r2 = 1: only the limit 1/2 exists", SUPREMUM)
    return 0.5 * (1.0 - r2sq) * r2sq * v2 * v2 / den


def dark_settings(u: float, r2: float, phase: float = 0.0, n3: int = 1) -> Tuple[OpticalSetting, OpticalSetting]:
    """(Phi1', Phi2) realising the dark fringe for given ``u`` and ``r2``."""
    _check(u, r2)
    t2 = math.sqrt(1.0 - r2 * r2)
    n = math.hypot(u * r2, t2)
    if n == 0.0:
        raise SingularPointError("u = 0 and r2 = 1: H1' is undefined", SUPREMUM)
    side1 = OpticalSetting(phase + n3 * math.pi, u * r2 / n, t2 / n)
    side2 = OpticalSetting(phase, r2, t2, u)
    return side1, side2


@dataclass(frozen=True)
class IfmReport:
    u: float
    r2: float
    dark_coincidence: float
    absorption: float
    efficiency: float
    supremum: bool = False
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "r2": self.r2,
            "p_dark": self.dark_coincidence,
            "p_abs": self.absorption,
            "eta": self.efficiency,
            "supremum": self.supremum,
            "degenerate": self.degenerate,
        }


def ifm_efficiency(u: float, r2: float) -> IfmReport:
    """Fraction of object detections that are interaction-free.

    ``supremum`` marks the limiting point (u = 0, r2 -> 1) where only the
    bound 1/2 is approached; ``degenerate`` marks u so close to 1 that both
    channels have closed.
    """
    _check(u, r2)
    absorption = 0.5 * (1.0 - u * u)
    if absorption == 0.0:
        raise NoInteractionError("u = 1: the object absorbs nothing, efficiency undefined")
    try:
        dark = dark_coincidence_prob(u, r2)
    except SingularPointError as exc:
        sup = exc.supremum
        return IfmReport(u, r2, sup, absorption, sup / (sup + absorption), supremum=True)
    return IfmReport(u, r2, dark, absorption, dark / (dark + absorption), degenerate=absorption < TOL)


def sweep(us: Iterable[float], r2s: Iterable[float]) -> list:
    r2s = list(r2s)
    rows = []
    for u in us:
        for r2 in r2s:
            if u == 1.0:
                rows.append(IfmReport(u, r2, 0.0, 0.0, math.nan, degenerate=True))
            else:
                rows.append(ifm_efficiency(u, r2))
    return rows


def sweep_csv(rows: Sequence[IfmReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        flag = "supremum" if r.supremum else "degenerate" if r.degenerate else ""
        writer.writerow([repr(float(x)) for x in (r.u, r.r2, r.dark_coincidence, r.absorption, r.efficiency)] + [flag])
    return buf.getvalue()


class EventClass(str, enum.Enum):
    CONCLUSIVE = "conclusive"
    INCONCLUSIVE = "inconclusive"
    DESTRUCTIVE = "destructive"


@dataclass(frozen=True)
class IfmContext:
    """Settings on both sides during an IFM run and whether the object is in place."""

    side1: OpticalSetting
    side2: OpticalSetting
    object_present: bool = True

    def check(self) -> None:
        if abs(math.cos(self.side1.phase - self.side2.phase) + 1.0) > TOL:
            raise ClassificationUnsupportedError("phi1' - phi2 is not an odd multiple of pi")
        s1, s2 = self.side1, self.side2
        if abs(s2.u * s1.t * s2.r - s1.r * s2.t) > 1e-9:
            raise ClassificationUnsupportedError("splitters do not satisfy u t1' r2 = r1' t2")


def classify_event(record, context: IfmContext) -> EventClass:
    """Classify one record taken in the dark-fringe configuration.

    ``record`` needs ``o1`` and ``o2`` attributes (e.g. an ``EventRecord``);
    a ``pair`` attribute, when present, must be ``"1p2"``.
    """
    context.check()
    pair = getattr(record, "pair", "1p2")
    if pair != "1p2":
        raise ClassificationUnsupportedError(f"record taken in setting pair {pair!r}, not (Phi1', Phi2)")
    o1, o2 = record.o1, record.o2
    if not context.object_present and (o2 == "A" or (o1, o2) == ("L", "L")):
        raise DomainError(f"outcome ({o1}, {o2}) cannot occur without the object")
    if o2 == "A":
        return EventClass.DESTRUCTIVE
    if (o1, o2) == ("L", "L"):
        return EventClass.CONCLUSIVE
    return EventClass.INCONCLUSIVE

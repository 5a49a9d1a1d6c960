"""Closed-form joint and single detection probabilities.

Phases enter only through ``cos(phi1 - phi2)`` and are never reduced modulo
2*pi, so very large phases (|phi| > 1e6) lose the usual floating point
accuracy of ``math.cos``.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from .errors import DomainError
from .optics import SIDE1, SIDE2, JointProbabilityTable, OpticalSetting


def joint_prob_standard(phi1: float, phi2: float, pair: Tuple[str, str]) -> float:
    """Lossless 50-50 set-up without absorber."""
    o1, o2 = pair
    if o1 not in SIDE1 or o2 not in ("L", "U"):
        raise DomainError(f"standard set-up has outcomes {{L,U}}x{{L,U}} only, got {pair!r}")
    c = math.cos(phi1 - phi2)
    return 0.25 * (1.0 + c) if o1 == o2 else 0.25 * (1.0 - c)


def joint_prob_general(s1: OpticalSetting, s2: OpticalSetting, pair: Tuple[str, str]) -> float:
    o1, o2 = pair
    if o1 not in SIDE1 or o2 not in SIDE2:
        raise DomainError(f"unknown outcome pair {pair!r}")
    r1, t1, r2, t2, u = s1.r, s1.t, s2.r, s2.t, s2.u
    cross = 2.0 * u * r1 * r2 * t1 * t2 * math.cos(s1.phase - s2.phase)
    if o2 == "A":
        # photon 1 then necessarily came through beam D
        return 0.5 * (1.0 - u * u) * (r1 * r1 if o1 == "L" else t1 * t1)
    if (o1, o2) == ("L", "L"):
        return 0.5 * (u * u * r1 * r1 * t2 * t2 + t1 * t1 * r2 * r2 + cross)
    if (o1, o2) == ("U", "U"):
        return 0.5 * (u * u * t1 * t1 * r2 * r2 + r1 * r1 * t2 * t2 + cross)
    if (o1, o2) == ("L", "U"):
        return 0.5 * (t1 * t1 * t2 * t2 + u * u * r1 * r1 * r2 * r2 - cross)
    return 0.5 * (r1 * r1 * r2 * r2 + u * u * t1 * t1 * t2 * t2 - cross)


def joint_table(s1: OpticalSetting, s2: OpticalSetting) -> JointProbabilityTable:
    values = np.array([[joint_prob_general(s1, s2, (a, b)) for b in SIDE2] for a in SIDE1])
    # cancellation can leave -1e-17 on dark outcomes
    return JointProbabilityTable(np.clip(values, 0.0, 1.0))


def single_detection_probs(s2: OpticalSetting) -> Tuple[float, float, float]:
    """Side-2 singles ``(P(L2), P(U2), P(A2))``."""
    u2 = s2.u * s2.u
    return (
        0.5 * (u2 * s2.t * s2.t + s2.r * s2.r),
        0.5 * (u2 * s2.r * s2.r + s2.t * s2.t),
        0.5 * (1.0 - u2),
    )

"""Hardy constraint system for the maximally entangled source.

Three coincidences are forced to vanish::

    P(L1,Phi1; L2,Phi2) = P(U1,Phi1; U2,Phi2') = P(U1,Phi1'; U2,Phi2) = 0

which pins every cosine of a phase difference to -1 and leaves the splitter
ratios tied by ``u r1 t2 = t1 r2``, ``u' t1 r2' = r1 t2'`` and
``u t1' r2 = r1' t2``.  Multiplying the three gives
``u**2 u' t1' r2' = r1' t2'``, so choosing the primed splitters ``(t1', r2')``
and ``u'`` fixes everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from . import closed_form
from .errors import DomainError, InfeasibleError
from .optics import JointProbabilityTable, OpticalSetting, oracle_table

TOL = 1e-12

# Setting pairs in the order (Phi1,Phi2), (Phi1,Phi2'), (Phi1',Phi2), (Phi1',Phi2').
SETTING_PAIRS = ("12", "12p", "1p2", "1p2p")

FEASIBILITY_MESSAGE = "feasibility requires (t1')^2 + (r2')^2 >= 1"


def _require_odd(**ints: int) -> None:
    for name, n in ints.items():
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n % 2 == 0:
            raise DomainError(f"{name} must be an odd integer, got {n!r}")


def assign_phases(phi0: float, n1: int = 1, n2: int = 1, n3: int = 1) -> Tuple[float, float, float, float]:
    """Return ``(phi1, phi2, phi1', phi2')`` with ``phi2' = phi0``."""
    _require_odd(n1=n1, n2=n2, n3=n3)
    pi = math.pi
    return (
        n2 * pi + phi0,
        (n2 - n1) * pi + phi0,
        (n3 + n2 - n1) * pi + phi0,
        phi0,
    )


@dataclass(frozen=True)
class HardyConfiguration:
    t1p: float
    r2p: float
    u1p: float = 1.0
    phi0: float = 0.0
    n1: int = 1
    n2: int = 1
    n3: int = 1

    def __post_init__(self):
        for name in ("t1p", "r2p", "u1p"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise DomainError(f"{name}={value!r} outside [0, 1]")
        if self.u1p == 0.0:
            raise DomainError("u' = 0 is excluded: the Hardy probability vanishes identically")
        if not math.isfinite(self.phi0):
            raise DomainError(f"phi0 must be finite, got {self.phi0!r}")
        _require_odd(n1=self.n1, n2=self.n2, n3=self.n3)

    @classmethod
    def diagonal(cls, q: float, **kwargs) -> "HardyConfiguration":
        """Symmetric choice ``t1' = r2' = q``."""
        return cls(t1p=q, r2p=q, **kwargs)

    @property
    def feasibility_slack(self) -> float:
        return self.t1p**2 + self.r2p**2 - 1.0

    @property
    def is_feasible(self) -> bool:
        return self.feasibility_slack >= -TOL

    def to_dict(self) -> dict:
        return {
            "t1p": self.t1p,
            "r2p": self.r2p,
            "u1p": self.u1p,
            "phi0": self.phi0,
            "n1": self.n1,
            "n2": self.n2,
            "n3": self.n3,
        }


@dataclass(frozen=True)
class HardySolution:
    config: HardyConfiguration
    phi1: OpticalSetting
    phi1p: OpticalSetting
    phi2: OpticalSetting
    phi2p: OpticalSetting
    hardy_probability: float
    _cache: Dict[str, Dict[str, JointProbabilityTable]] = field(
        default_factory=dict, repr=False, compare=False
    )

    @property
    def u(self) -> float:
        return self.phi2.u

    @property
    def r1(self) -> float:
        return self.phi1.r

    @property
    def t1(self) -> float:
        return self.phi1.t

    @property
    def r2(self) -> float:
        return self.phi2.r

    @property
    def t2(self) -> float:
        return self.phi2.t

    @property
    def subensemble_fraction(self) -> float:
        """Share of pairs not absorbed under Phi2."""
        return 0.5 * (1.0 + self.u**2)

    def settings(self, pair: str) -> Tuple[OpticalSetting, OpticalSetting]:
        side1 = self.phi1p if pair.startswith("1p") else self.phi1
        side2 = self.phi2p if pair.endswith("2p") else self.phi2
        if pair not in SETTING_PAIRS:
            raise DomainError(f"unknown setting pair {pair!r}")
        return side1, side2

    def tables(self, oracle: bool = False) -> Dict[str, JointProbabilityTable]:
        """Joint tables for the four setting pairs, keyed by ``SETTING_PAIRS``."""
        key = "oracle" if oracle else "closed"
        if key not in self._cache:
            fn = oracle_table if oracle else closed_form.joint_table
            self._cache[key] = {p: fn(*self.settings(p)) for p in SETTING_PAIRS}
        return self._cache[key]

    def constraint_residuals(self) -> Tuple[float, float, float]:
        """Residuals of the three splitter relations (zero for a valid solution)."""
        c = self.config
        return (
            self.u * self.r1 * self.t2 - self.t1 * self.r2,
            c.u1p * self.t1 * self.phi2p.r - self.r1 * self.phi2p.t,
            self.u * self.phi1p.t * self.r2 - self.phi1p.r * self.t2,
        )

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "u": self.u,
            "u_squared": self.u**2,
            "r1": self.r1,
            "t1": self.t1,
            "r2": self.r2,
            "t2": self.t2,
            "r1p": self.phi1p.r,
            "t1p": self.phi1p.t,
            "r2p": self.phi2p.r,
            "t2p": self.phi2p.t,
            "u1p": self.phi2p.u,
            "settings": {
                "phi1": self.phi1.to_dict(),
                "phi1p": self.phi1p.to_dict(),
                "phi2": self.phi2.to_dict(),
                "phi2p": self.phi2p.to_dict(),
            },
            "hardy_probability": self.hardy_probability,
            "subensemble_fraction": self.subensemble_fraction,
        }


def solve_u_squared(t1p: float, r2p: float, u1p: float = 1.0) -> float:
    """Absorber transmission probability forced by the primed splitters.

    Raises :class:`InfeasibleError` outside the physical region.
    """
    slack = t1p * t1p + r2p * r2p - 1.0
    if slack < -TOL:
        raise InfeasibleError(
            f"{FEASIBILITY_MESSAGE}; got {t1p * t1p + r2p * r2p!r} for t1'={t1p!r}, r2'={r2p!r}"
        )
    r1p = math.sqrt(max(0.0, 1.0 - t1p * t1p))
    t2p = math.sqrt(max(0.0, 1.0 - r2p * r2p))
    den = u1p * t1p * r2p
    if den == 0.0:
        # only (0, 1) and (1, 0) reach here; both sit on the boundary where u = 1
        return 1.0
    u2 = r1p * t2p / den
    if u2 > 1.0 + TOL:
        raise InfeasibleError(
            f"u^2 = {u2!r} > 1: with u'={u1p!r} the splitters need u' t1' r2' >= r1' t2'"
        )
    return min(u2, 1.0)


def solve_hardy(config: HardyConfiguration) -> HardySolution:
    t1p, r2p, u1p = config.t1p, config.r2p, config.u1p
    u2 = solve_u_squared(t1p, r2p, u1p)
    u = math.sqrt(u2)
    r1p = math.sqrt(max(0.0, 1.0 - t1p * t1p))
    t2p = math.sqrt(max(0.0, 1.0 - r2p * r2p))

    # r1/t1 = u' r2'/t2'
    n = math.hypot(u1p * r2p, t2p)
    r1, t1 = u1p * r2p / n, t2p / n

    # (t2/r2)^2 = t1' t2' / (u' r1' r2'); written without u to stay defined at u = 0
    a, b = math.sqrt(u1p * r1p * r2p), math.sqrt(t1p * t2p)
    n = math.hypot(a, b)
    if n == 0.0:
        # (t1', r2') = (1, 1): any H2 works; take the diagonal limit, a 50-50 splitter
        r2 = t2 = math.sqrt(0.5)
    else:
        r2, t2 = a / n, b / n

    phi1, phi2, phi1p, phi2p = assign_phases(config.phi0, config.n1, config.n2, config.n3)
    return HardySolution(
        config=config,
        phi1=OpticalSetting(phi1, r1, t1),
        phi1p=OpticalSetting(phi1p, r1p, t1p),
        phi2=OpticalSetting(phi2, r2, t2, u),
        phi2p=OpticalSetting(phi2p, r2p, t2p, u1p),
        hardy_probability=hardy_probability_formula(u1p, t1p, r2p, u2),
    )


def hardy_probability_formula(u1p: float, t1p: float, r2p: float, u2: float) -> float:
    return 0.5 * (u1p * t1p * r2p * (1.0 - u2)) ** 2


def hardy_probability(solution: HardySolution) -> float:
    """P(U1,Phi1'; U2,Phi2') of a solution."""
    c = solution.config
    return hardy_probability_formula(c.u1p, c.t1p, c.r2p, solution.u**2)


def hardy_probability_diagonal(q: float) -> float:
    """Hardy probability on ``t1' = r2' = q`` with ``u' = 1``."""
    return 0.5 * (2.0 * q * q - 1.0) ** 2


@dataclass(frozen=True)
class StandardInfeasibility:
    """Why the absorber-free 50-50 set-up cannot give a Hardy contradiction."""

    n: Tuple[int, int, int]
    phases: Tuple[float, float, float, float]
    primed_multiple: int
    cos_primed: float
    p_uu_primed: float
    correlations: Tuple[float, float, float, float]
    chsh_sum: float

    def to_dict(self) -> dict:
        return {
            "n": list(self.n),
            "phases": list(self.phases),
            "phi1p_minus_phi2p_over_pi": self.primed_multiple,
            "cos_phi1p_minus_phi2p": self.cos_primed,
            "p_uu_primed": self.p_uu_primed,
            "correlations": list(self.correlations),
            "chsh_sum": self.chsh_sum,
        }


def check_standard_infeasibility(n1: int, n2: int, n3: int) -> StandardInfeasibility:
    phi1, phi2, phi1p, phi2p = assign_phases(0.0, n1, n2, n3)
    std = closed_form.joint_prob_standard

    def corr(a: float, b: float) -> float:
        return (
            std(a, b, ("L", "L"))
            + std(a, b, ("U", "U"))
            - std(a, b, ("L", "U"))
            - std(a, b, ("U", "L"))
        )

    es = (corr(phi1, phi2), corr(phi1, phi2p), corr(phi1p, phi2), corr(phi1p, phi2p))
    return StandardInfeasibility(
        n=(n1, n2, n3),
        phases=(phi1, phi2, phi1p, phi2p),
        primed_multiple=n2 + n3 - n1,
        cos_primed=math.cos(phi1p - phi2p),
        p_uu_primed=std(phi1p, phi2p, ("U", "U")),
        correlations=es,
        chsh_sum=es[0] + es[1] + es[2] - es[3],
    )


def _grid_probability(t1p: np.ndarray, r2p: np.ndarray, u1p: float = 1.0) -> np.ndarray:
    """Vectorised Hardy probability; NaN where infeasible."""
    r1p = np.sqrt(np.clip(1.0 - t1p**2, 0.0, None))
    t2p = np.sqrt(np.clip(1.0 - r2p**2, 0.0, None))
    den = u1p * t1p * r2p
    with np.errstate(divide="ignore", invalid="ignore"):
        u2 = np.where(den > 0.0, r1p * t2p / np.where(den > 0.0, den, 1.0), 1.0)
    feasible = (t1p**2 + r2p**2 - 1.0 >= -TOL) & (u2 <= 1.0 + TOL)
    u2 = np.minimum(u2, 1.0)
    return np.where(feasible, 0.5 * (u1p * t1p * r2p * (1.0 - u2)) ** 2, np.nan)


@dataclass(frozen=True)
class HardyMaximum:
    config: HardyConfiguration
    probability: float
    profile: Optional[np.ndarray] = field(default=None, repr=False)


def _argmax_lex(values: np.ndarray) -> int:
    # np.nanargmax returns the first maximum, i.e. the lexicographically smallest
    # (t1', r2') because the grids are flattened t-major
    return int(np.nanargmax(values))


def maximize_hardy(resolution: int = 100, region: str = "full", refine_rounds: int = 4) -> HardyMaximum:
    """Deterministic grid search for the largest Hardy probability with ``u' = 1``.

    ``region`` is ``"full"`` (feasible quarter disc complement), ``"boundary"``
    (the circle ``t1'^2 + r2'^2 = 1``) or ``"diagonal"`` (``t1' = r2'``).
    The diagonal search also returns the probability profile along ``q``.
    """
    if resolution < 2:
        raise DomainError(f"resolution must be >= 2, got {resolution}")

    if region == "boundary":
        theta = np.linspace(0.0, math.pi / 2, resolution)
        t, r = np.cos(theta), np.sin(theta)
        probs = np.array([solve_hardy(HardyConfiguration(ti, ri)).hardy_probability
                          for ti, ri in zip(np.clip(t, 0, 1), np.clip(r, 0, 1))])
        k = int(np.argmax(probs))
        return HardyMaximum(HardyConfiguration(float(np.clip(t[k], 0, 1)), float(np.clip(r[k], 0, 1))),
                            float(probs[k]), np.column_stack([theta, probs]))

    if region == "diagonal":
        q = np.linspace(math.sqrt(0.5), 1.0, resolution)
        probs = _grid_probability(q, q)
        k = _argmax_lex(probs)
        return HardyMaximum(HardyConfiguration.diagonal(float(q[k])), float(probs[k]),
                            np.column_stack([q, probs]))

    if region != "full":
        raise DomainError(f"unknown region {region!r}")

    lo_t = lo_r = 0.0
    hi_t = hi_r = 1.0
    best = (-1.0, 0.0, 0.0)
    for _ in range(refine_rounds + 1):
        ts = np.linspace(lo_t, hi_t, resolution)
        rs = np.linspace(lo_r, hi_r, resolution)
        T, R = np.meshgrid(ts, rs, indexing="ij")
        probs = _grid_probability(T.ravel(), R.ravel())
        if np.all(np.isnan(probs)):
            break
        k = _argmax_lex(probs)
        if probs[k] > best[0]:
            best = (float(probs[k]), float(T.ravel()[k]), float(R.ravel()[k]))
        step_t = (hi_t - lo_t) / (resolution - 1)
        step_r = (hi_r - lo_r) / (resolution - 1)
        lo_t, hi_t = max(0.0, best[1] - step_t), min(1.0, best[1] + step_t)
        lo_r, hi_r = max(0.0, best[2] - step_r), min(1.0, best[2] + step_r)
    return HardyMaximum(HardyConfiguration(best[1], best[2]), best[0])

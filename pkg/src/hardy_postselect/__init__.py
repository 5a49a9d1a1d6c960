"""Hardy-type two-photon interferometry with a partial absorber.

Solves the Hardy constraints for the maximally entangled pair, audits the
postselected and full-ensemble Bell-type inequalities, enumerates local
deterministic strategies, simulates coincidence records and analyses the
interaction-free measurement mode of the same set-up.
"""

from .bell import InequalityReport, ch_postselected, ch_simplified_bound, ch_total, chsh
from .closed_form import joint_prob_general, joint_prob_standard, joint_table, single_detection_probs
from .hardy import (
    HardyConfiguration,
    HardySolution,
    assign_phases,
    check_standard_infeasibility,
    hardy_probability,
    maximize_hardy,
    solve_hardy,
)
from .optics import JointProbabilityTable, OpticalSetting, outcome_probabilities, propagate_amplitudes

__all__ = [
    "HardyConfiguration",
    "HardySolution",
    "InequalityReport",
    "JointProbabilityTable",
    "OpticalSetting",
    "assign_phases",
    "ch_postselected",
    "ch_simplified_bound",
    "ch_total",
    "check_standard_infeasibility",
    "chsh",
    "hardy_probability",
    "joint_prob_general",
    "joint_prob_standard",
    "joint_table",
    "maximize_hardy",
    "outcome_probabilities",
    "propagate_amplitudes",
    "single_detection_probs",
    "solve_hardy",
]

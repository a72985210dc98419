"""Reserve-based school admissions: choice rules, mechanisms, audits and oracles."""
from .core import (INF, CutoffProfile, Instance, InstanceError, Matching, School, Seat, Student,
                   affordable_set, best_affordable, to_standard, validate_instance)
from .choice import (ChoiceResult, PrecedenceSpec, SplitApplicants, c_backward_transfer,
                     c_precedence, c_sim_flex, c_sim_or, c_sim_oro, c_sim_ro, c_sim_sep, c_star,
                     check_choice_properties)
from .engine import DATrace, da_run, da_run_subschool
from .audit import (StabilityReport, StageCutoffs, VerificationVerdict, compute_cutoffs,
                    is_or_verifiable, is_ro_verifiable, stability_report, verify_sequential)
from .mechanisms import (MECHANISM_IDS, MechanismResult, SequentialPreferences,
                         consistent_subschool_list, run_mechanism, seq_or, seq_ro, sim_flex,
                         sim_or, sim_oro, sim_ro, sim_sep)

__version__ = "0.1.0"

"""Exact identity checks, convergence-order checks and inequality property tests."""
from .identities import check_commutators, check_forcing_decomposition
from .inequalities import check_inequalities, constant_stability
from .multiplier import check_multiplier_identity
from .report import SUITES, run_suite, write_report
from .wave import check_wave_reformulation

__all__ = ["check_commutators", "check_forcing_decomposition", "check_inequalities",
           "constant_stability", "check_multiplier_identity", "check_wave_reformulation",
           "SUITES", "run_suite", "write_report"]

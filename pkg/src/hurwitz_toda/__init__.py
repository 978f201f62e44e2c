"""Hurwitz-number tau functions, their Toda-type hierarchy and string equations, checked numerically and exactly."""

from .hurwitz import double_hurwitz_coeff, hurwitz_bruteforce, hurwitz_frobenius, hurwitz_table
from .partitions import Partition, character_table, dim, enumerate_partitions, kappa, mn_character
from .report import CheckResult
from .schur import eval_special_c, schur_poly
from .suite import ConfigError, Report, RunConfig, run_suite
from .tau import Deriv, TauSpec, eval_Z, eval_Ztilde, eval_Ztilde_single, tail_bound

__version__ = "0.1.0"

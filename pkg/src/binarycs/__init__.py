"""Deterministic binary compressive sensing with a single-pass decoder."""

from .field import PrimeField, Poly, index_to_poly, is_prime, poly_eval, poly_to_index
from .matrix import (DeVoreMatrix, empirical_rip_constant, expander_beta, rip_constant_bound,
                     verify_expansion_bruteforce, verify_main_assumption)
from .planner import (Plan, SubGaussianParams, plan_expander, plan_l1, plan_new, plan_table,
                      random_expander_params, smallest_prime_geq, subgaussian_m)
from .recovery import (DecodeResult, NoiseSpec, RecoveryConfig, decode_exact, decode_robust,
                       reduced_vector, support_test)
from .sparse import SparseVector
from .baselines import basis_pursuit_decode, expander_decode
from .harness import ExperimentSpec, gen_shot_noise, gen_sparse, run_experiment

__version__ = "0.1.0"

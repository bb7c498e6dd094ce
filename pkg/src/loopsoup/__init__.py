"""Random walk loop soups on finite weighted graphs.

Exact characteristic functionals of loop observables via determinant
ratios, Poissonian soup sampling, planar winding fields with their
high-intensity Gaussian limit, matrix-valued loop holonomies, and the
Cauchy limit law for winding in a shrinking annulus.  Every closed-form
quantity is cross-checked against brute-force loop enumeration and
Monte Carlo in the experiment harness.
"""

from .graph import (GraphError, OneForm, WeightedGraph, build_transition,
                    greens_function, perturbed_transition)
from .harness import (ConfigError, ExperimentConfig, Report,
                      batch_means_stderr, emit_report, run_experiment,
                      run_functionals)
from .holonomy import (Connection, HolonomyError, exact_holonomy_expectation,
                       holonomy_limit, holonomy_log_enumeration, holonomy_trace)
from .linalg import hadamard, logdet_i_minus, logdet_stable
from .loops import (EnumerationCapError, LoopError, RootedLoop, UnrootedLoop,
                    charfn_log_enumeration, clt_limit_charfn, clt_variance,
                    enumerate_loops, enumeration_second_moment, exact_charfn,
                    length_mass, loop_integral, mu_of_unrooted, rooted_weight,
                    tail_bound, total_mass, trace_identity_residual)
from .sampler import (LoopSoupSample, PowerCache, SamplerError, SoupConfig,
                      grid_window, sample_soup, sample_soup_functionals,
                      stream_generator, z2_truncation_bound)
from .spitzer import (AnnulusWindingParams, CauchyLaw, ConvergenceReport,
                      SpitzerError, annulus_charfn, cauchy_limit_charfn,
                      convergence_report, scaled_charfn)
from .winding import (Cut, CutError, CutOneForm, EmbeddingError, Face,
                      PlanarMap, WindingFieldSample, build_cut,
                      covariance_kernel, cut_weight_matrices, extract_faces,
                      field_sample, gff_partition_ratio, two_point_direct,
                      winding_charfn_exact, winding_number)

__version__ = "0.1.0"

__all__ = [
    "AnnulusWindingParams", "CauchyLaw", "ConfigError", "Connection",
    "ConvergenceReport", "Cut", "CutError", "CutOneForm", "EmbeddingError",
    "EnumerationCapError", "ExperimentConfig", "Face", "GraphError",
    "HolonomyError", "LoopError", "LoopSoupSample", "OneForm", "PlanarMap",
    "PowerCache", "Report", "RootedLoop", "SamplerError", "SoupConfig",
    "SpitzerError", "UnrootedLoop", "WeightedGraph", "WindingFieldSample",
    "annulus_charfn", "batch_means_stderr", "build_cut", "build_transition",
    "cauchy_limit_charfn", "charfn_log_enumeration", "clt_limit_charfn",
    "clt_variance", "convergence_report", "covariance_kernel",
    "cut_weight_matrices", "emit_report", "enumerate_loops",
    "enumeration_second_moment", "exact_charfn",
    "exact_holonomy_expectation", "extract_faces", "field_sample",
    "gff_partition_ratio", "greens_function", "grid_window", "hadamard",
    "holonomy_limit", "holonomy_log_enumeration", "holonomy_trace",
    "length_mass", "logdet_i_minus", "logdet_stable", "loop_integral",
    "mu_of_unrooted", "perturbed_transition", "rooted_weight",
    "run_experiment", "run_functionals", "sample_soup",
    "sample_soup_functionals", "scaled_charfn", "stream_generator",
    "tail_bound", "total_mass", "trace_identity_residual",
    "two_point_direct", "winding_charfn_exact", "winding_number",
    "z2_truncation_bound",
]

"""Separation sequences, L^q spectra, measure approximation and Fourier
probes for self-similar iterated function systems."""

from .config import Budget, default_budget
from .errors import (BudgetError, ConvergenceError, DegenerateMapError, DimensionError,
                     DomainError, IFSLabError, NotSimilitudeError, UnsupportedError)
from .geometry import PointCloud, Polytope, block_diag, convex_hull, hausdorff_distance, operator_norm
from .ifs import (IFS, Similarity, WeightedIFS, attractor_hull, attractor_points, chaos_game,
                  compose, map_distance, product_ifs, similarity_1d, similarity_dimension)
from .measures import (DiscreteMeasure, MixtureMeasure, SelfSimilarMeasure, aggregate, convolve,
                       dl_distance, dyadic_histogram, lq_dimension_estimate, lq_tau_k, quantize,
                       scale_measure)
from .separation import (check_ssc_level, delta_n, delta_star_n, dimension_verdict,
                         esc_diagnostic, find_ssc_subsystem)
from .approximation import approximate_measure, approximate_set
from .fourier import decay_probe, fourier_transform
from .corpus import builtin, builtin_names

__version__ = "0.1.0"

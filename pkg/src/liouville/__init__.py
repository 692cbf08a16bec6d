"""Boundary Liouville CFT on the annulus: special functions, structure
constants, Virasoro conformal blocks and bootstrap spectral integrals."""

from .errors import (BranchError, DomainError, InvalidDecay, LiouvilleError,
                     NonConvergence, PoleError, SingularGram, TailWarning,
                     ZeroWarning)
from .numerics import (QuadratureResult, QuadratureSpec, integrate_adaptive,
                       integrate_halfline_gaussian)
from .specialfn import (ConformalWeight, LiouvilleParams, dedekind_eta,
                        double_gamma, double_sine, gamma_complex, l_ratio,
                        log_double_gamma, partition_count, upsilon,
                        upsilon_prime_zero)
from .structure_constants import (BoundaryWeight, SpectrumPoint,
                                  bulk_boundary, bulk_boundary_mu0, dozz,
                                  fzz_mu0_one_point, fzz_mub_derivative,
                                  fzz_one_point, g_gamma_derivative,
                                  reflection)
from .virasoro import (BlockCoefficients, BlockSeries, GramMatrix, Partition,
                       block_coefficients, block_series, evaluate_block,
                       gram_matrix, kac_degenerate_weight,
                       one_point_matrix_element, orthonormalize,
                       partitions_of)
from .bootstrap import (BootstrapResult, PartitionFunctionResult,
                        gamma_insertion_bootstrap, lqg_partition,
                        one_point_bootstrap, two_point_bootstrap,
                        write_integrand_csv)

__version__ = "0.1.0"

"""brlab: a numerical laboratory for quasiradial summability kernels.

Homogeneous distance functions and their unit spheres, the dyadic-angular
multiplier decomposition, discrete Fourier kernel synthesis with decay labs,
convex-surface cap geometry, moment-cancelling atoms, and maximal-operator
experiments measuring weak-type and strong-type constants at desk scale.
"""

from .gauge import (CriticalIndex, DilationGroup, Gauge, GaugeError,
                    auxiliary_index, critical_index)
from .surface import (Cap, ConvexSurface, FiniteTypeProbe, OmegaProfile,
                      angle_height_ratio)
from .decomp import (AngularPartition, DyadicBump, PieceMultiplier,
                     RadialPiece, assemble_radial, radial_pieces)
from .fourier import (GridSpec, KernelBundle, SampledField, bessel_j0_integral,
                      radial_kernel_oracle, read_field, synthesize,
                      synthesize_piece_kernel, write_field)
from .hardy import (Atom, WeakTypeReport, ball_volume, lp_norm, make_atom,
                    weak_quasinorm, weak_sum_bound, weak_sum_constant)
from .riesz import (MaximalField, TGrid, maximal, piece_maximal, riesz_mean,
                    strong_type_experiment, weak_type_experiment)

__version__ = "0.1.0"

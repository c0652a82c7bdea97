"""specsing: spectral singularities of a planar slab with gain and a weak
Kerr-type nonlinearity.

Computes the linear lasing threshold of the slab, the first-order corrections
a nonlinearity imposes on it, the intensity of the emitted radiation above
threshold, and verifies everything against direct integration of the
nonlinear boundary-value problem.  The RK4 shooting kernel is compiled
(Cython) when available, with a pure-Python fallback selected at import time.
"""

from ._backend import backend_name
from .errors import (BelowThresholdError, BlowUpError, ConvergenceError,
                     DegenerateParameterError, InvalidParameterError,
                     InvalidRegimeError, PoleError, QuadratureError,
                     SingularityProximityError, SingularParameterError,
                     SpecsingError)
from .linear_scattering import (LinearSingularity, find_linear_singularity,
                                linear_face_terms, linear_field,
                                reflection_transmission, round_trip_mismatch,
                                threshold_gain, threshold_gain_weak_absorption)
from .nonlinear_bvp import (FieldTrajectory, ScatteringAmplitudes,
                            ShootingConfig, ShootingResult,
                            assemble_amplitudes, face_terms, integrate_field)
from .perturbation import (FirstOrderShift, IntensityResult, ShiftConstraint,
                           emitted_intensity, face_term_derivatives,
                           face_term_derivatives_weak_absorption,
                           first_order_face_term, first_order_face_term_kerr,
                           first_order_face_term_kerr_weak_absorption,
                           first_order_field, green_kernel, kerr_threshold,
                           left_emission_check, modified_gain, solve_shift)
from .singularity_finder import (FinderConstraint, SeedOrigin,
                                 SingularityResult, SweepPoint,
                                 find_nonlinear_singularity,
                                 intensity_for_gain, sweep, sweep_to_csv)
from .slab_model import (FieldState, GainReport, NonlinearityKind,
                         NonlinearitySpec, SlabMedium, WavePoint,
                         gain_from_kappa, kerr_law, scale_to_dimensionless,
                         time_reverse_to_cpa)

__version__ = "0.1.0"

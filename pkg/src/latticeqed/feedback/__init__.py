from .fpt import (CriticalityReport, DivergentVarianceError, FeedbackResponse,
                  SpinLightModel, bec_parameter_map, characteristic_polynomial,
                  characteristic_roots, conditional_linear_run, critical_gain,
                  critical_exponent_fit, critical_gain_numeric, fit_divergence,
                  noise_spectrum, nonlinear_spin_run,
                  quadrature_variance_integral, response_transform,
                  synthetic_divergence_samples)
from .markovian import (critical_gain_markovian, feedback_unitary,
                        fermion_feedback_run, locked_intensity,
                        locked_magnetization, markovian_feedback_run,
                        phase_rotation_run, spectral_peak, tuned_frequency)

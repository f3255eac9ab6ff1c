from .angular import (AngularSweep, classical_intensity, diffraction_kernel,
                      incoherent_intensity, intensity_expectation,
                      intensity_squared_direct, intensity_squared_expectation,
                      photon_number_variance, quadrature_variance,
                      quantum_addition, quantum_addition_numeric,
                      quantum_addition_traveling)
from .extras import (BraggPeak, bond_intensity_meanfield,
                     bragg_peak_conditions, free_space_rate,
                     isotropic_background, matter_quadrature_variances,
                     molecule_intensity, molecule_intensity_curve,
                     molecule_stage_names)
from .fermion import (classical_diffraction, fermion_additions,
                      magnetic_structure_factor)
from .moments import (AtomicStateMoments, coherent_moments, insulator_moments,
                      moment_table, numeric_moments,
                      superfluid_block_variance, superfluid_moments)
from .spectrum import (SpectrumResult, fit_gaussian_envelope,
                       number_distribution_mi, number_distribution_sf,
                       spectrum_area, transmission_spectrum, voigt_envelope)

from .collective import (DoubleWellParams, GaussianClosureParams,
                         effective_double_well, gaussian_closure,
                         gaussian_closure_initial, gaussian_closure_jump,
                         gaussian_closure_rhs, growth_exponent_difference,
                         initial_packet, jump_map, jump_probability,
                         packet_rhs, packet_to_pq, pq_to_packet,
                         riccati_closed_form, stationary_point,
                         stationary_point_numeric)
from .frozen import (CatState, FrozenSolution, analytic_qmc, cat_assembler,
                     cavity_photon_distribution, collapse_fwhm, collapse_peak,
                     conditioned_photocount_distribution, doublet_splitting,
                     frozen_solution, gaussian_prior, mandel_q,
                     nonlinear_component_phase, nonlinear_phase_full,
                     photocount_distribution, purity_after_losses,
                     traced_purity, transmission_count_phase,
                     transmission_drift_rate)
from .lindblad import lindblad_evolve, liouvillian, pure_density
from .mcwf import (JumpChannel, StepSizeError, TrajectoryRecord,
                   default_timestep, effective_hamiltonian, mcwf_ensemble,
                   mcwf_run)
from .rng import stream, streams
from .runs import (bond_eigenspace_distribution, fermion_trajectory_run,
                   frozen_magnetization_distribution, homodyne_component_positions,
                   homodyne_count_phase, homodyne_jump_run,
                   magnetization_distribution, odd_population_distribution,
                   phase_measurement_run, staggered_bond_operator,
                   uniform_bond_operator)
from .sme import TraceDriftError, sme_run, visibility_threshold
from .states import (count_components, entanglement_entropy,
                     expected_component_count, mode_populations,
                     mode_statistics, multimode_pdc_amplitudes,
                     multimode_pdc_entropy_limit, schmidt_entropy)
from .twomode import (twomode_hamiltonian, twomode_jump, twomode_population,
                      twomode_superfluid)
from .zeno import (ZENO_STEADY_TRIPLE, evolve_nonhermitian,
                   measurement_subspaces, pair_correlation_prediction,
                   projected_second_order, three_site_populations_analytic,
                   zeno_effective)

from .classify import ClassifyThresholds, fock_support_count, phase_classify
from .designer import (GeometryError, InteractionProfile, bessel_profile,
                       check_mode_angles, design_cavity_couplings,
                       design_probe_amplitudes, morse_profile,
                       multi_cavity_profile, multi_probe_profile,
                       probe_angle_for_mode, single_pair_profile,
                       yukawa_profile)
from .diagrams import (MI_TIP_EXACT, DiagramPoint, bond_max_diagram_point,
                       density_phase_diagram, homogeneous_bh_family,
                       insulator_boundary, insulator_gap, insulator_tip,
                       order_parameter, photon_signal,
                       quantum_superposition_gap, solve_fixed_filling,
                       solve_point)
from .families import (DensityModeFamily, StaggeredBondFamily,
                       TwoModeBondQOLFamily, UniformBondFamily,
                       bond_phase_pattern, optimize_coherent_bonds)
from .multimode import (classical_limit_fixed_filling,
                        classical_limit_optimizer, classical_mode_energy,
                        multimode_family, multimode_solve)
from .single_site import (CutoffError, SiteHamiltonian, SiteSolution,
                          required_cutoff, solve_site)
from .solver import (MeanFieldState, iterate_family, multistart_solve)

"""A slice through the two-mode phase diagram at half filling: the
light-induced interaction stabilizes a density wave that melts through a
supersolid into the uniform superfluid as tunneling grows."""

import numpy as np

from latticeqed.meanfield import (DensityModeFamily, phase_classify,
                                  solve_fixed_filling)

for zt in (0.1, 0.6, 2.5):
    fam = DensityModeFamily(chi=np.array([1.0, -1.0], dtype=complex),
                            g_eff=-1.25 / 100, interaction=1.0,
                            chemical_potential=0.0, zt0=zt, n_sites=100)
    st, _ = solve_fixed_filling(fam, 0.5, n_random=4)
    print(f"zt0/U = {zt:4.2f}: {phase_classify(st):12s} "
          f"rho = {np.round(st.rho, 3)}  |psi| = {np.round(np.abs(st.psi), 3)}")

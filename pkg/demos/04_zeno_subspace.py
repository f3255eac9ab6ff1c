"""Strong measurement of the middle-site occupation confines three atoms
to a measurement eigenspace; the outer sites stay coupled through
virtual excursions, relaxing to a dark superposition at second order."""

import numpy as np

from latticeqed.core import (HamiltonianSpec, build_basis, build_hamiltonian,
                             number_op)
from latticeqed.trajectories import (ZENO_STEADY_TRIPLE, evolve_nonhermitian,
                                     zeno_effective)

gamma = 100.0
basis = build_basis(3, 3)
h0 = build_hamiltonian(HamiltonianSpec(tunneling=1.0), basis)
c = np.sqrt(2 * gamma) * number_op(basis, 1)
gen = zeno_effective(h0, c, np.sqrt(2 * gamma))
idx = {s: i for i, s in enumerate(basis.states)}
psi0 = np.zeros(basis.dim, complex)
psi0[idx[(2, 1, 0)]] = 1.0
_, _, psi_end = evolve_nonhermitian(gen, psi0, 1e-3, 250.0)
tri = np.array([psi_end[idx[k]] for k in [(2, 1, 0), (1, 1, 1), (0, 1, 2)]])
tri /= np.linalg.norm(tri)
print("steady state:", np.round(tri.real, 4))
print("overlap with (1, -sqrt2, 1)/2:",
      abs(np.vdot(ZENO_STEADY_TRIPLE, tri)))

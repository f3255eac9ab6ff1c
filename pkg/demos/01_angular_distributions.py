"""Angle-resolved light scattering from the reference atomic states.

The delocalized state scatters extra light everywhere (the quantum
addition R), the pinned insulator scatters none beyond the classical
diffraction peaks, and the independent-site coherent state sits exactly
at R = N_K. Run from the repository root:

    python3 demos/01_angular_distributions.py
"""

import numpy as np

from latticeqed.scattering import (AngularSweep, classical_intensity,
                                   coherent_moments, insulator_moments,
                                   quantum_addition, superfluid_moments)

n_atoms = n_sites = 30
sweep = AngularSweep(theta_probe=0.0, k_sites=n_sites, period=0.5)

states = {
    "insulator": insulator_moments(1),
    "superfluid": superfluid_moments(n_atoms, n_sites),
    "coherent": coherent_moments(1.0),
}

print(f"angles: {len(sweep.theta_grid)} points, K = {n_sites} sites")
for name, moments in states.items():
    r = quantum_addition(moments, sweep)
    print(f"{name:>10}: max R = {r.max():8.3f}   min R = {r.min():8.3f}")

# at the 90-degree diffraction minimum only the delocalized state shines
minimum = AngularSweep(theta_probe=0.0, theta_grid=np.array([np.pi / 2]),
                       k_sites=n_sites, period=0.5)
print("\nat the diffraction minimum:")
for name, moments in states.items():
    print(f"{name:>10}: R = {quantum_addition(moments, minimum)[0]:.3f}")

cl = classical_intensity(states["superfluid"], sweep)
print(f"\nclassical diffraction peak: {cl.max():.0f} (= N_K^2)")

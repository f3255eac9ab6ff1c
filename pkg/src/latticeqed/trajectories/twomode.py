"""Exact two-mode (odd/even sublattice) model of N delocalized atoms.

Basis |l> = l atoms in the odd mode, N - l in the even mode; tunneling is
the Schwinger hopping -J (a'b + b'a) and the measured population is
diagonal. This is the (N+1)-dimensional reduction used for the collective
oscillation, detector-efficiency and feedback studies.
"""

import numpy as np
import scipy.sparse as sp


def twomode_hamiltonian(n_atoms, j_hop, interaction=0.0, sites_per_mode=None):
    """Tridiagonal H0; optional weak interaction U/M_j per mode."""
    l = np.arange(n_atoms + 1)
    off = -j_hop * np.sqrt((l[:-1] + 1.0) * (n_atoms - l[:-1]))
    diag = np.zeros(n_atoms + 1)
    if interaction and sites_per_mode:
        u_eff = interaction / sites_per_mode
        diag = 0.5 * u_eff * (l * (l - 1.0) + (n_atoms - l) * (n_atoms - l - 1.0))
    return sp.diags([off, diag, off], offsets=[-1, 0, 1], format="csr",
                    dtype=complex)


def twomode_population(n_atoms, which="odd"):
    """Diagonal population operator: N_odd, N_even or their difference."""
    l = np.arange(n_atoms + 1, dtype=float)
    if which == "odd":
        d = l
    elif which == "even":
        d = n_atoms - l
    elif which == "difference":
        d = 2 * l - n_atoms
    else:
        raise ValueError(f"unknown population {which!r}")
    return sp.diags(d.astype(complex), format="csr")


def twomode_superfluid(n_atoms):
    """Balanced delocalized initial state: binomial amplitudes."""
    from scipy.stats import binom
    amps = np.sqrt(binom.pmf(np.arange(n_atoms + 1), n_atoms, 0.5))
    return amps.astype(complex) / np.linalg.norm(amps)


def twomode_jump(n_atoms, gamma, which="odd"):
    """c = sqrt(2 gamma) * population, so c'c = 2 gamma * population^2."""
    return np.sqrt(2 * gamma) * twomode_population(n_atoms, which)

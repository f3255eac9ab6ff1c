"""Multimode density orders and the frozen-tunneling integer optimizer."""

import itertools
import math

import numpy as np

from .families import DensityModeFamily
from .solver import multistart_solve


def classical_mode_energy(occupations, chi, g_eff, interaction, mu,
                          sites_per_mode):
    """Per-site energy of integer mode fillings at frozen tunneling."""
    occ = np.asarray(occupations, dtype=float)
    chi = np.asarray(chi, dtype=complex)
    r = len(chi)
    e_site = float(np.mean(0.5 * interaction * occ * (occ - 1.0) - mu * occ))
    s_d = complex(np.sum(chi * sites_per_mode * occ))
    total_sites = sites_per_mode * r
    # Fock states carry no on-site number fluctuations
    return e_site + g_eff * abs(s_d) ** 2 / total_sites


def classical_limit_optimizer(r_modes, chi, g_eff, interaction, mu,
                              sites_per_mode, n_max=4):
    """Exhaustive integer-occupation minimizer at t0 = 0.

    Returns (best occupations tuple, energy, degeneracy).
    """
    best, best_e, degeneracy = None, math.inf, 0
    for occ in itertools.product(range(n_max + 1), repeat=r_modes):
        e = classical_mode_energy(occ, chi, g_eff, interaction, mu,
                                  sites_per_mode)
        if e < best_e - 1e-12:
            best, best_e, degeneracy = occ, e, 1
        elif abs(e - best_e) <= 1e-12:
            degeneracy += 1
    return best, best_e, degeneracy


def classical_limit_fixed_filling(r_modes, chi, g_eff, interaction,
                                  filling, sites_per_mode, n_max=4):
    """Same optimizer constrained to mean filling (in atoms per site)."""
    target = filling * r_modes
    best, best_e, degeneracy = None, math.inf, 0
    for occ in itertools.product(range(n_max + 1), repeat=r_modes):
        if abs(sum(occ) - target) > 1e-9:
            continue
        e = classical_mode_energy(occ, chi, g_eff, interaction, 0.0,
                                  sites_per_mode)
        if e < best_e - 1e-12:
            best, best_e, degeneracy = occ, e, 1
        elif abs(e - best_e) <= 1e-12:
            degeneracy += 1
    return best, best_e, degeneracy


def multimode_family(r_modes, g_eff, interaction, mu, zt0, j_d=1.0,
                     n_sites=99, cutoff=10):
    chi = j_d * np.exp(2j * np.pi * np.arange(r_modes) / r_modes)
    return DensityModeFamily(chi=chi, g_eff=g_eff, interaction=interaction,
                             chemical_potential=mu, zt0=zt0,
                             n_sites=n_sites, cutoff=cutoff)


def multimode_solve(r_modes, g_eff, interaction, mu, zt0, seed=11, **kwargs):
    fam = multimode_family(r_modes, g_eff, interaction, mu, zt0, **kwargs)
    return multistart_solve(fam, r_modes, seed=seed)

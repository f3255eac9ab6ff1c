"""Phase-diagram sweeps, boundary scans and fixed-filling solves."""

import math
from dataclasses import dataclass

import numpy as np

from .classify import fock_support_count, phase_classify
from .families import DensityModeFamily, UniformBondFamily
from .solver import MeanFieldState, multistart_solve

MI_TIP_EXACT = 1.0 / (3.0 + 2.0 * math.sqrt(2.0))


def solve_point(family, seed=11, **kwargs):
    return multistart_solve(family, family.r_modes, seed=seed, **kwargs)


def solve_fixed_filling(family_or_maker, filling, mu_bounds=None, seed=11,
                        tol=1e-6, n_random=8, **kwargs):
    """Lowest-energy state at fixed mean filling (canonical multistart).

    Accepts a family directly or a zero-argument/one-argument maker for
    backward compatibility; returns (state, mu_shift).
    """
    from .solver import multistart_solve_canonical
    family = family_or_maker
    if callable(family_or_maker):
        try:
            family = family_or_maker(0.0)
        except TypeError:
            family = family_or_maker()
    state = multistart_solve_canonical(family, family.r_modes, filling,
                                       seed=seed, tol=kwargs.pop("iter_tol", 1e-9),
                                       n_random=n_random)
    return state, state.mu_shift


def homogeneous_bh_family(zt0, mu, interaction=1.0, cutoff=10):
    """Plain decoupled lattice model (shared code path at g_eff = 0)."""
    return DensityModeFamily(chi=np.array([1.0 + 0j]), g_eff=0.0,
                             interaction=interaction, chemical_potential=mu,
                             zt0=zt0, n_sites=100, cutoff=cutoff)


def order_parameter(zt0, mu, interaction=1.0, g_eff=0.0, chi=None,
                    n_sites=100, cutoff=10, seed=11):
    chi = np.array([1.0 + 0j]) if chi is None else chi
    fam = DensityModeFamily(chi=chi, g_eff=g_eff, interaction=interaction,
                            chemical_potential=mu, zt0=zt0, n_sites=n_sites,
                            cutoff=cutoff)
    return solve_point(fam, seed=seed)


def order_response_slope(zt, mu, interaction=1.0, g_eff=0.0, j_d=1.0,
                         n_sites=100, cutoff=10, eps=1e-7):
    """Growth factor of a vanishing order parameter under one iteration.

    The insulator loses stability where the slope of the self-consistency
    map psi -> <b>(psi) crosses one; this numerically differentiates the
    same site solves the iteration performs.
    """
    fam = DensityModeFamily(chi=np.array([j_d + 0j]), g_eff=g_eff,
                            interaction=interaction, chemical_potential=mu,
                            zt0=zt, n_sites=n_sites, cutoff=cutoff)
    seed_state = MeanFieldState(np.array([0.0 + 0j]),
                                np.array([1.0]), np.array([0.0 + 0j]))
    # self-consistent density of the zero-order branch
    for _ in range(80):
        sol = fam.solve_modes(seed_state)[0]
        if abs(sol.rho - seed_state.rho[0]) < 1e-12:
            break
        seed_state.rho = np.array([sol.rho])
    probe = MeanFieldState(np.array([eps + 0j]), seed_state.rho.copy(),
                           np.array([0.0 + 0j]))
    sol = fam.solve_modes(probe)[0]
    return abs(sol.psi) / eps


def insulator_boundary(mu, interaction=1.0, g_eff=0.0, j_d=1.0, n_sites=100,
                       cutoff=10, zt_hi=None, tol=1e-8, seed=11):
    """Critical z t0 at fixed mu, from the stability of the zero branch."""
    u_eff = interaction + 2 * g_eff * j_d ** 2
    zt_hi = zt_hi if zt_hi is not None else 0.6 * u_eff

    def excess(zt):
        return order_response_slope(zt, mu, interaction, g_eff, j_d,
                                    n_sites, cutoff) - 1.0

    lo, hi = 1e-6, zt_hi
    if excess(lo) > 0:
        return lo
    if excess(hi) < 0:
        raise ValueError("no order up to zt_hi; enlarge the bracket")
    from scipy.optimize import brentq
    return brentq(excess, lo, hi, xtol=tol)


def insulator_tip(interaction=1.0, g_eff=0.0, j_d=1.0, n_sites=100,
                  lobe=1, cutoff=10, seed=11):
    """Largest critical z t0 of the MI(lobe) region (the lobe tip).

    The collective density shift moves the lobe in mu, so the search
    window tracks mu_eff = mu - 2 g J^2 N_s n - g J^2 (1 - 2 n).
    """
    from scipy.optimize import minimize_scalar
    u_eff = interaction + 2 * g_eff * j_d ** 2
    mu_shift = (2 * g_eff * j_d ** 2 * n_sites * lobe
                + g_eff * j_d ** 2 * (1 - 2 * lobe))

    def neg_boundary(mu):
        return -insulator_boundary(mu, interaction, g_eff, j_d, n_sites,
                                   cutoff=cutoff)

    res = minimize_scalar(neg_boundary,
                          bounds=(mu_shift + u_eff * (lobe - 1 + 0.2),
                                  mu_shift + u_eff * (lobe - 0.2)),
                          method="bounded", options={"xatol": 1e-6})
    return -res.fun


@dataclass
class DiagramPoint:
    x: float
    y: float
    label: str
    total_order: float
    imbalance: float
    energy: float
    converged: bool


def density_phase_diagram(zt_values, mu_values, g_eff, r_modes=2,
                          interaction=1.0, j_d=1.0, n_sites=100, cutoff=10,
                          seed=11, thresholds=None):
    """Grid sweep of the R-mode density family; returns DiagramPoint list.

    r_modes=2 uses the alternating pattern (90-degree scattering); r_modes>2
    uses the phase-root pattern exp(i 2 pi phi / R).
    """
    if r_modes == 2:
        chi = j_d * np.array([1.0, -1.0], dtype=complex)
    else:
        chi = j_d * np.exp(2j * np.pi * np.arange(r_modes) / r_modes)
    points = []
    for zt in np.atleast_1d(zt_values):
        for mu in np.atleast_1d(mu_values):
            fam = DensityModeFamily(chi=chi, g_eff=g_eff,
                                    interaction=interaction,
                                    chemical_potential=mu, zt0=zt,
                                    n_sites=n_sites, cutoff=cutoff)
            st = solve_point(fam, seed=seed)
            support = _fock_support(fam, st)
            label = phase_classify(st, thresholds,
                                   fock_components=support)
            points.append(DiagramPoint(zt, mu, label, st.total_order(),
                                       st.density_imbalance(), st.energy,
                                       st.converged))
    return points


def _fock_support(family, state):
    hams = family._site_hamiltonians(state)
    counts = []
    for h in hams:
        mat = h.matrix()
        w, v = np.linalg.eigh(mat)
        counts.append(fock_support_count(v[:, 0]))
    return max(counts)


def quantum_superposition_gap(filling, interaction, g_eff, j_d, n_sites):
    """Gap of the two-component state, U rho + g J^2 (2 N_s rho + 1)."""
    return (interaction * filling
            + g_eff * j_d ** 2 * (2 * n_sites * filling + 1.0))


def insulator_gap(lobe, interaction, g_eff, j_d, n_sites):
    """Particle-addition gap U n + g J^2 (2 N_s n + 1) at commensurate n."""
    return (interaction * lobe
            + g_eff * j_d ** 2 * (2 * n_sites * lobe + 1.0))


def bond_max_diagram_point(zt, mu, g_eff, j_bond=0.05, interaction=1.0,
                           z_coord=6, n_sites=100, cutoff=10, seed=11):
    """Single point of the renormalized-tunneling (uniform bond) diagram."""
    fam = UniformBondFamily(j_bond=j_bond, g_eff=g_eff,
                            interaction=interaction, chemical_potential=mu,
                            t0=zt / z_coord, z_coord=z_coord,
                            n_sites=n_sites, cutoff=cutoff)
    st = solve_point(fam, seed=seed)
    return st, phase_classify(st)


def photon_signal(state, n_sites, j_d=1.0):
    """<a'a> ~ (Delta rho)^2 N_s^2 for the two-mode density wave."""
    return (j_d * state.density_imbalance() * n_sites) ** 2

"""Prepared measurement runs: phase-coupled, fermionic and homodyne cases."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..core.fock import BosonFockBasis, FermionFockBasis
from ..core.hamiltonian import HamiltonianSpec, build_hamiltonian
from ..core.operators import (SparseComplexOperator, hop_op, number_op,
                              weighted_bond_sum, weighted_number_sum, zero_op)
from .mcwf import JumpChannel, mcwf_run


def _mat(op):
    return op.matrix if isinstance(op, SparseComplexOperator) else op


def uniform_bond_operator(basis, periodic=False):
    """B1 = sum_m (b'_m b_{m+1} + h.c.), the kinetic-energy pattern."""
    n_bonds = basis.n_sites if periodic else basis.n_sites - 1
    return weighted_bond_sum(basis, np.ones(n_bonds), periodic)


def staggered_bond_operator(basis, periodic=False):
    """B2 = sum_m (-1)^m (b'_m b_{m+1} + h.c.), coupling k to k - pi/d."""
    n_bonds = basis.n_sites if periodic else basis.n_sites - 1
    return weighted_bond_sum(basis, (-1.0) ** np.arange(n_bonds), periodic)


def momentum_pair_populations(basis, which=None):
    """Operators O_k = n_k + n_{k - pi/a} over the reduced zone.

    ``which`` optionally restricts to a list of mode indices.
    """
    m = basis.n_sites
    ks = 2 * np.pi * np.arange(m) / m
    indices = range(m // 2) if which is None else which
    ops = {}
    for ki in indices:
        op = zero_op(basis)
        for pair in (ki, (ki + m // 2) % m):
            kv = ks[pair]
            for a in range(m):
                for b in range(m):
                    op = op + (np.exp(1j * kv * (a - b)) / m) \
                        * hop_op(basis, a, b)
        ops[ki] = op
    return ops


def phase_measurement_run(kind, n_atoms, n_sites, gamma, dt, t_final, seed,
                          interaction=0.0, j_hop=1.0, psi0=None,
                          periodic=True, record_every=10):
    """Quantum-jump run coupling to matter-phase variables.

    kind='uniform': c ~ B1 commutes with the U=0 Hamiltonian (QND).
    kind='staggered': c ~ B2, which does not commute; trajectories confine
    to a subspace of neither operator.
    """
    basis = BosonFockBasis(n_atoms, n_sites)
    spec = HamiltonianSpec(tunneling=j_hop, interaction=interaction,
                           periodic=periodic)
    h0 = build_hamiltonian(spec, basis)
    bond = uniform_bond_operator(basis, periodic) if kind == "uniform" \
        else staggered_bond_operator(basis, periodic)
    c = np.sqrt(2 * gamma) * bond
    if psi0 is None:
        psi0 = np.zeros(basis.dim, dtype=complex)
        filled = tuple([n_atoms] + [0] * (n_sites - 1))
        psi0[basis.index[filled]] = 1.0

    obs = {"bond": bond, "bond_sq": bond @ bond}
    for s in range(n_sites):
        obs[f"n{s}"] = number_op(basis, s)
    rec = mcwf_run(h0, [JumpChannel(c, label=kind)], psi0, dt, t_final, seed,
                   observables=obs, record_every=record_every)
    rec.basis = basis
    rec.bond_operator = bond
    return rec


def bond_eigenspace_distribution(state, bond_op, decimals=8):
    """Probability over eigenvalue classes of a bond operator."""
    mat = _mat(bond_op).toarray()
    vals, vecs = np.linalg.eigh(mat)
    amps = np.abs(vecs.conj().T @ np.asarray(state)) ** 2
    keys = np.round(vals, decimals)
    uniq = np.unique(keys)
    probs = np.array([amps[keys == u].sum() for u in uniq])
    return uniq, probs


# ----------------------------------------------------------------------
# fermionic runs
# ----------------------------------------------------------------------

def fermion_measurement_operators(basis, pattern_weights):
    """(D_x, D_y): density and magnetization couplings with given weights."""
    dx = weighted_number_sum(basis, pattern_weights, spin="density")
    dy = weighted_number_sum(basis, pattern_weights, spin="magnetization")
    return dx, dy


def fermion_trajectory_run(kind, n_sites, n_up, n_down, gamma, dt, t_final,
                           seed, interaction=0.0, j_hop=1.0, periodic=True,
                           record_every=10):
    """Fermionic conditioned runs.

    kind='afm': staggered magnetization channel (builds AFM correlations).
    kind='pair_break': density-at-odd-sites channel only.
    kind='pair_protect': both density and magnetization channels.
    """
    basis = FermionFockBasis(n_up, n_down, n_sites)
    spec = HamiltonianSpec(tunneling=j_hop, interaction=interaction,
                           statistics="fermion", periodic=periodic)
    h0 = build_hamiltonian(spec, basis)

    stag = (-1.0) ** np.arange(n_sites)
    odd = (np.arange(n_sites) % 2 == 0).astype(float)
    dx, dy = fermion_measurement_operators(basis, odd)
    _, ms = fermion_measurement_operators(basis, stag)

    if kind == "afm":
        channels = [JumpChannel(np.sqrt(2 * gamma) * ms, label="m_stag")]
    elif kind == "pair_break":
        channels = [JumpChannel(np.sqrt(2 * gamma) * dx, label="d_odd")]
    elif kind == "pair_protect":
        channels = [JumpChannel(np.sqrt(2 * gamma) * dx, label="d_odd"),
                    JumpChannel(np.sqrt(2 * gamma) * dy, label="m_odd")]
    else:
        raise ValueError(f"unknown kind {kind!r}")

    from ..core.hamiltonian import ground_state
    _, psi0 = ground_state(h0)

    obs = {"m_stag": ms, "m_stag_sq": ms @ ms, "n_odd": dx}
    rec = mcwf_run(h0, channels, psi0, dt, t_final, seed,
                   observables=obs, record_every=record_every)
    rec.basis = basis
    rec.operators = {"dx": dx, "dy": dy, "m_stag": ms}
    return rec


def odd_population_distribution(state, basis):
    """p(N_odd) of the summed-spin occupation of the odd sublattice."""
    odd_sites = [s for s in range(basis.n_sites) if s % 2 == 0]
    occ = basis.occupations("up") + basis.occupations("down")
    pops = occ[:, odd_sites].sum(axis=1)
    w = np.abs(np.asarray(state)) ** 2
    vals = np.arange(pops.max() + 1)
    probs = np.zeros(len(vals))
    np.add.at(probs, pops, w)
    return vals, probs


def magnetization_distribution(state, basis, weights=None):
    """p(M) for M = sum_j w_j (n_up - n_down)_j (unit weights default)."""
    m = basis.n_sites
    w = np.ones(m) if weights is None else np.asarray(weights, dtype=float)
    mag = (basis.occupations("up") - basis.occupations("down")).astype(float) @ w
    probs = {}
    amp2 = np.abs(np.asarray(state)) ** 2
    for val, p in zip(np.round(mag, 9), amp2):
        probs[val] = probs.get(val, 0.0) + p
    keys = np.array(sorted(probs))
    return keys, np.array([probs[k] for k in keys])


def frozen_magnetization_distribution(p0_vals, p0_probs, m_counts, tau):
    """p(M) ~ |M|^{2m} exp(-tau M^2) p0(M), the frozen fermionic collapse."""
    vals = np.asarray(p0_vals, dtype=float)
    w = np.abs(vals) ** (2 * m_counts) * np.exp(-tau * vals ** 2)
    p = w * np.asarray(p0_probs, dtype=float)
    return vals, p / p.sum()


# ----------------------------------------------------------------------
# homodyne-style detection (local oscillator mixed into the jump operator)
# ----------------------------------------------------------------------

@dataclass
class HomodyneCatPrediction:
    z_plus: float
    z_minus: float
    per_count_phase: float


def homodyne_component_positions(flux, kappa, coupling_abs, count_rate,
                                 phase_offset):
    """Eigenvalue labels of the two surviving components.

    z_pm = sqrt(F / (2 kappa |C|^2)) * (pm sqrt(m/t/F - sin^2 dphi) - cos dphi).
    """
    ratio = count_rate / flux
    root = ratio - math.sin(phase_offset) ** 2
    if root < 0:
        raise ValueError("count rate below the local-oscillator floor")
    scale = math.sqrt(flux / (2 * kappa * coupling_abs ** 2))
    zeta_p = math.sqrt(root) - math.cos(phase_offset)
    zeta_m = -math.sqrt(root) - math.cos(phase_offset)
    return scale * zeta_p, scale * zeta_m


def homodyne_count_phase(flux, count_rate, phase_offset):
    """Per-count relative phase between the two components.

    pi for in-phase mixing (sign flip per count); for quadrature mixing
    (dphi = pi/2) the kick is arctan(sqrt(m/t - F)/sqrt(F)).
    """
    if abs(math.sin(phase_offset)) < 1e-12:
        return math.pi
    excess = max(count_rate - flux, 0.0)
    return 2 * math.atan2(math.sqrt(excess), math.sqrt(flux))


def homodyne_jump_run(flux, theta, n_atoms, gamma, dt, t_final, seed,
                      record_every=10):
    """Frozen-lattice homodyne unravelling on the odd/even difference.

    The jump operator sqrt(F) e^{i theta} + sqrt(2 gamma) D acts on the
    (N+1)-dimensional difference basis; tunneling is frozen.
    """
    from .twomode import twomode_population, twomode_superfluid
    d_op = twomode_population(n_atoms, "difference")
    dim = n_atoms + 1
    c = (math.sqrt(flux) * np.exp(1j * theta) * sp.identity(dim, format="csr")
         + math.sqrt(2 * gamma) * d_op)
    h0 = sp.csr_matrix((dim, dim), dtype=complex)
    psi0 = twomode_superfluid(n_atoms)
    obs = {"difference": d_op, "difference_sq": d_op @ d_op}
    rec = mcwf_run(h0, [JumpChannel(c, label="homodyne")], psi0, dt, t_final,
                   seed, observables=obs, record_every=record_every)
    return rec

"""Mode-decoupled mean-field families for light-coupled lattice gases.

Each family linearizes H_BH + (g_eff/2)(F'F + FF') around per-mode mean
fields (psi, rho, <b^2>) and exposes per-mode single-site problems plus
an independent energy functional on the product state. The sign structure
is generated from the decoupling itself: maximal scattering (g_eff < 0)
self-organizes, minimal scattering (g_eff > 0) suppresses fluctuations.
"""

import math
from dataclasses import dataclass

import numpy as np

from .single_site import SiteHamiltonian, solve_site


def _neighbor_field(psi, mode, r_modes, topology):
    """Mean order parameter over the neighbours of a mode."""
    if r_modes == 1:
        return psi[0]
    if topology == "bipartite" and r_modes == 2:
        return psi[1 - mode]
    return 0.5 * (psi[(mode + 1) % r_modes] + psi[(mode - 1) % r_modes])


def _site_moments(h):
    """Ground-state (psi, rho, <b^2>, <n^2>) of a site problem."""
    mat = h.matrix()
    w, v = np.linalg.eigh(mat)
    g = v[:, 0]
    n = np.arange(h.cutoff + 1)
    rho = float(np.real(np.vdot(g, n * g)))
    n2 = float(np.real(np.vdot(g, n * n * g)))
    sq = np.sqrt(n[1:])
    b_g = np.concatenate([sq * g[1:], [0.0]])
    psi = complex(np.vdot(g, b_g))
    b2_g = np.zeros_like(g)
    if h.cutoff >= 2:
        b2_g[: -2] = np.sqrt(n[1:-1] * n[2:]) * g[2:]
    pair = complex(np.vdot(g, b2_g))
    return psi, rho, pair, n2


def _bond_variance(psi_i, psi_j, rho_i, rho_j, pair_i, pair_j):
    """<(b'_i b_j + h.c.)^2> - <b'_i b_j + h.c.>^2 on a product state."""
    return (2 * np.real(np.conj(pair_i) * pair_j)
            + rho_i * (rho_j + 1) + (rho_i + 1) * rho_j
            - (2 * np.real(np.conj(psi_i) * psi_j)) ** 2)


@dataclass
class DensityModeFamily:
    """R density modes with couplings chi_phi (value-classed J_D pattern)."""

    chi: np.ndarray                  # complex couplings, one per mode
    g_eff: float = 0.0
    interaction: float = 1.0         # U
    chemical_potential: float = 0.0
    zt0: float = 0.1                 # z * t0
    n_sites: int = 100
    cutoff: int = 10
    topology: str = "auto"

    def __post_init__(self):
        self.chi = np.asarray(self.chi, dtype=complex)
        if self.topology == "auto":
            self.topology = "bipartite" if len(self.chi) == 2 else "ring"

    @property
    def r_modes(self):
        return len(self.chi)

    def sites_per_mode(self):
        return self.n_sites / self.r_modes

    def _site_hamiltonians(self, state):
        m_phi = self.sites_per_mode()
        s_d = complex(np.sum(self.chi * m_phi * state.rho))
        hams = []
        for phi in range(self.r_modes):
            nb = _neighbor_field(state.psi, phi, self.r_modes, self.topology)
            chi = self.chi[phi]
            lin = (-self.chemical_potential
                   + 2 * self.g_eff * np.real(np.conj(chi) * s_d)
                   + self.g_eff * abs(chi) ** 2 * (1 - 2 * state.rho[phi]))
            u_eff = self.interaction + 2 * self.g_eff * abs(chi) ** 2
            hams.append(SiteHamiltonian(
                hop=self.zt0 * nb, u_eff=u_eff, lin_n=lin,
                cutoff=self.cutoff))
        return hams

    def solve_modes(self, state):
        return [solve_site(h) for h in self._site_hamiltonians(state)]

    def energy(self, state):
        """Per-site energy of the product state (constants included)."""
        m_phi = self.sites_per_mode()
        w = 1.0 / self.r_modes
        sols = [_site_moments(h) for h in self._site_hamiltonians(state)]
        psi = np.array([s[0] for s in sols])
        rho = np.array([s[1] for s in sols])
        n2 = np.array([s[3] for s in sols])
        e = 0.0
        for phi in range(self.r_modes):
            nb = _neighbor_field(psi, phi, self.r_modes, self.topology)
            e += w * (-self.zt0 * np.real(np.conj(psi[phi]) * nb)
                      + 0.5 * self.interaction * (n2[phi] - rho[phi])
                      - self.chemical_potential * rho[phi])
        s_d = complex(np.sum(self.chi * m_phi * rho))
        var = n2 - rho ** 2
        e += self.g_eff * (abs(s_d) ** 2
                           + float(np.sum(np.abs(self.chi) ** 2 * m_phi * var))
                           ) / self.n_sites
        return float(e)


@dataclass
class UniformBondFamily:
    """Homogeneous bond coupling (diffraction maximum on the bonds).

    The order parameter renormalizes the tunneling:
    t_eff = t0 - 2 z g_eff J_B^2 N_s |psi|^2.
    """

    j_bond: float = 0.1
    g_eff: float = 0.0
    interaction: float = 1.0
    chemical_potential: float = 0.0
    t0: float = 0.02
    z_coord: int = 6
    n_sites: int = 100
    cutoff: int = 10

    r_modes = 1

    def effective_tunneling(self, psi):
        s_mean = self.z_coord * self.n_sites * abs(psi) ** 2
        return self.t0 - 2 * self.g_eff * self.j_bond ** 2 * s_mean

    def _site_hamiltonian(self, state):
        psi = state.psi[0]
        return SiteHamiltonian(
            hop=self.z_coord * self.effective_tunneling(psi) * psi,
            u_eff=self.interaction,
            lin_n=-self.chemical_potential,
            cutoff=self.cutoff)

    def solve_modes(self, state):
        return [solve_site(self._site_hamiltonian(state))]

    def energy(self, state):
        psi, rho, pair, n2 = _site_moments(self._site_hamiltonian(state))
        e = (-self.t0 * self.z_coord * abs(psi) ** 2
             + 0.5 * self.interaction * (n2 - rho)
             - self.chemical_potential * rho)
        s_mean = self.z_coord * self.n_sites * abs(psi) ** 2
        bond_var = (self.z_coord / 2.0) \
            * _bond_variance(psi, psi, rho, rho, pair, pair)
        e += self.g_eff * self.j_bond ** 2 * (s_mean ** 2 / self.n_sites
                                              + bond_var)
        return float(e)


@dataclass
class StaggeredBondFamily:
    """Alternating bond coupling J_{j,j+1} = (-1)^j J_B (90-degree case).

    Four site modes xi = 0..3 with bonds (xi, xi+1); the semiclassical part
    couples to the staggered sum of bond coherences (dimerization), the
    fluctuation part couples neighbouring densities and pair amplitudes.
    """

    j_bond: float = 0.1
    g_eff: float = 0.0
    interaction: float = 1.0
    chemical_potential: float = 0.0
    t0: float = 0.02
    z_coord: int = 6
    n_sites: int = 100
    cutoff: int = 10
    include_qol: bool = True

    r_modes = 4

    def staggered_sum(self, psi):
        """<B>/J_B with the (-1)^xi bond pattern (N_s z / 8 bonds each)."""
        total = 0.0
        for xi in range(4):
            bond = 2 * np.real(np.conj(psi[xi]) * psi[(xi + 1) % 4])
            total += (-1.0) ** xi * bond
        return total * self.z_coord * self.n_sites / 8.0

    def _site_hamiltonians(self, state):
        psi, rho, pair = state.psi, state.rho, state.pair
        sb = self.staggered_sum(psi)
        zh = self.z_coord / 2.0
        hams = []
        for xi in range(4):
            nxt, prv = (xi + 1) % 4, (xi - 1) % 4
            sgn_right = (-1.0) ** xi
            sgn_left = (-1.0) ** prv
            hop = zh * (self.t0 * (psi[nxt] + psi[prv])
                        - 2 * self.g_eff * self.j_bond ** 2 * sb
                        * (sgn_right * psi[nxt] + sgn_left * psi[prv]))
            lin = -self.chemical_potential
            pair_field = 0.0
            if self.include_qol:
                g2 = self.g_eff * self.j_bond ** 2 * zh
                lin += g2 * (2 * (rho[nxt] + rho[prv]) + 2.0)
                pair_field = g2 * (pair[nxt] + pair[prv])
                beta_r = 2 * np.real(np.conj(psi[xi]) * psi[nxt])
                beta_l = 2 * np.real(np.conj(psi[xi]) * psi[prv])
                hop += 2 * g2 * (beta_r * psi[nxt] + beta_l * psi[prv])
            hams.append(SiteHamiltonian(
                hop=hop, pair=pair_field, u_eff=self.interaction,
                lin_n=lin, cutoff=self.cutoff))
        return hams

    def solve_modes(self, state):
        return [solve_site(h) for h in self._site_hamiltonians(state)]

    def energy(self, state):
        sols = [_site_moments(h) for h in self._site_hamiltonians(state)]
        psi = np.array([s[0] for s in sols])
        rho = np.array([s[1] for s in sols])
        pair = np.array([s[2] for s in sols])
        n2 = np.array([s[3] for s in sols])
        zh = self.z_coord / 2.0
        e = 0.0
        for xi in range(4):
            nxt = (xi + 1) % 4
            bond = 2 * np.real(np.conj(psi[xi]) * psi[nxt])
            # N_s z / 8 bonds of each type
            e += (0.25 * (0.5 * self.interaction * (n2[xi] - rho[xi])
                          - self.chemical_potential * rho[xi])
                  - (self.z_coord / 8.0) * self.t0 * bond)
        sb = self.staggered_sum(psi)
        e += self.g_eff * self.j_bond ** 2 * sb ** 2 / self.n_sites
        if self.include_qol:
            fluct = sum(
                _bond_variance(psi[xi], psi[(xi + 1) % 4], rho[xi],
                               rho[(xi + 1) % 4], pair[xi],
                               pair[(xi + 1) % 4])
                for xi in range(4))
            e += self.g_eff * self.j_bond ** 2 * zh * fluct / 4.0
        return float(e)

    def bond_phases(self, state):
        """Phase of each bond coherence psi_xi* psi_xi+1."""
        return np.array([
            np.angle(np.conj(state.psi[xi]) * state.psi[(xi + 1) % 4])
            for xi in range(4)])

    def dimer_phase_difference(self, state):
        """Largest phase difference between adjacent bonds (pi for dimers)."""
        ph = self.bond_phases(state)
        diffs = np.abs(np.angle(np.exp(1j * (ph - np.roll(ph, 1)))))
        return float(diffs.max())

    def dimer_amplitude_difference(self, state):
        """Delta psi = ||psi_A|^2 - |psi_B|^2| / 2 over alternating sites."""
        a = np.abs(state.psi) ** 2
        return float(abs((a[0] + a[2]) / 2.0 - (a[1] + a[3]) / 2.0) / 2.0)

    def coherent_energy(self, psis):
        """Per-site energy of the coherent product ansatz (exact at U = 0).

        Coherent states have rho = |psi|^2, <b^2> = psi^2 and Poissonian
        on-site fluctuations, so the full functional is algebraic in psi.
        """
        psi = np.asarray(psis, dtype=complex)
        rho = np.abs(psi) ** 2
        pair = psi ** 2
        n2 = rho ** 2 + rho
        zh = self.z_coord / 2.0
        e = 0.0
        for xi in range(4):
            nxt = (xi + 1) % 4
            bond = 2 * np.real(np.conj(psi[xi]) * psi[nxt])
            e += (0.25 * (0.5 * self.interaction * (n2[xi] - rho[xi])
                          - self.chemical_potential * rho[xi])
                  - (self.z_coord / 8.0) * self.t0 * bond)
        sb = self.staggered_sum(psi)
        e += self.g_eff * self.j_bond ** 2 * sb ** 2 / self.n_sites
        if self.include_qol:
            fluct = sum(
                _bond_variance(psi[xi], psi[(xi + 1) % 4], rho[xi],
                               rho[(xi + 1) % 4], pair[xi],
                               pair[(xi + 1) % 4])
                for xi in range(4))
            e += self.g_eff * self.j_bond ** 2 * zh * fluct / 4.0
        return float(e)


def optimize_coherent_bonds(family, filling, seed=11, n_starts=14):
    """Minimize the coherent-ansatz energy at fixed filling.

    Returns (psi array, energy). Used for the U = 0 dimer phases where
    the grand-canonical site problem is degenerate.
    """
    from scipy.optimize import minimize
    from ..trajectories.rng import stream

    rng = stream(seed)
    radius = math.sqrt(filling)

    def pack(x):
        psi = x[:4] * np.exp(1j * x[4:])
        # project onto the filling constraint
        norm = np.sqrt(np.mean(np.abs(psi) ** 2))
        return psi * (radius / max(norm, 1e-12))

    def objective(x):
        return family.coherent_energy(pack(x))

    best_x, best_e = None, math.inf
    starts = [np.concatenate([np.full(4, radius), np.zeros(4)]),
              np.concatenate([np.full(4, radius),
                              [0.0, 0.0, math.pi, math.pi]]),
              np.concatenate([np.full(4, radius),
                              [0.0, math.pi, 0.0, math.pi]])]
    for _ in range(n_starts):
        starts.append(np.concatenate([
            rng.uniform(0.3, 1.6, 4) * radius,
            rng.uniform(0, 2 * math.pi, 4)]))
    for x0 in starts:
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": 4000, "xatol": 1e-10,
                                "fatol": 1e-12})
        if res.fun < best_e:
            best_e, best_x = res.fun, res.x
    return pack(best_x), float(best_e)


def bond_phase_pattern(psis):
    """Bond phases and the adjacent-bond phase difference of an ansatz."""
    psi = np.asarray(psis, dtype=complex)
    phases = np.array([np.angle(np.conj(psi[xi]) * psi[(xi + 1) % 4])
                       for xi in range(4)])
    diffs = np.abs(np.angle(np.exp(1j * (phases - np.roll(phases, 1)))))
    return phases, float(diffs.max())


@dataclass
class TwoModeBondQOLFamily:
    """Staggered bonds at minimal scattering (g_eff > 0).

    The semiclassical bond sum cancels on a two-mode pattern, leaving the
    fluctuation coupling of neighbouring densities and pair amplitudes,
    which can stabilize a short-range density wave.
    """

    j_bond: float = 0.1
    g_eff: float = 0.0
    interaction: float = 1.0
    chemical_potential: float = 0.0
    t0: float = 0.02
    z_coord: int = 6
    cutoff: int = 10
    n_sites: int = 100

    r_modes = 2

    def _site_hamiltonians(self, state):
        psi, rho, pair = state.psi, state.rho, state.pair
        g2 = self.g_eff * self.j_bond ** 2 * self.z_coord
        hams = []
        for xi in range(2):
            other = 1 - xi
            beta = 2 * np.real(np.conj(psi[xi]) * psi[other])
            hop = (self.z_coord * self.t0 * psi[other]
                   + 2 * g2 * beta * psi[other])
            hams.append(SiteHamiltonian(
                hop=hop,
                pair=g2 * pair[other],
                u_eff=self.interaction,
                lin_n=-self.chemical_potential + g2 * (2 * rho[other] + 1.0),
                cutoff=self.cutoff))
        return hams

    def solve_modes(self, state):
        return [solve_site(h) for h in self._site_hamiltonians(state)]

    def energy(self, state):
        sols = [_site_moments(h) for h in self._site_hamiltonians(state)]
        psi = np.array([s[0] for s in sols])
        rho = np.array([s[1] for s in sols])
        pair = np.array([s[2] for s in sols])
        n2 = np.array([s[3] for s in sols])
        bond = 2 * np.real(np.conj(psi[0]) * psi[1])
        e = (-(self.z_coord / 2.0) * self.t0 * bond
             + 0.25 * self.interaction * float(np.sum(n2 - rho))
             - self.chemical_potential * float(rho.mean()))
        g2 = self.g_eff * self.j_bond ** 2 * self.z_coord / 2.0
        e += g2 * _bond_variance(psi[0], psi[1], rho[0], rho[1],
                                 pair[0], pair[1])
        return float(e)

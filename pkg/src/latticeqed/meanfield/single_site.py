"""Single-site problems of the decoupled lattice Hamiltonians."""

from dataclasses import dataclass, field

import numpy as np

DEFAULT_CUTOFF = 10
SATURATION = 1e-8


class CutoffError(RuntimeError):
    """Top Fock level saturated; enlarge the cutoff."""


@dataclass
class SiteHamiltonian:
    """h = -(hop* b + hop b') + pair* b^2 + pair b'^2
           + (u_eff/2) n(n-1) + lin_n n + quad terms + const.

    ``nn_density`` couples n to a neighbour mean density (adds to lin_n),
    ``const`` carries the over-counting corrections into the energy.
    """

    hop: complex = 0.0
    pair: complex = 0.0
    u_eff: float = 0.0
    lin_n: float = 0.0       # includes -mu and density shifts
    const: float = 0.0
    cutoff: int = DEFAULT_CUTOFF

    def matrix(self):
        n = np.arange(self.cutoff + 1)
        m = np.diag(0.5 * self.u_eff * n * (n - 1) + self.lin_n * n
                    ).astype(complex)
        sq = np.sqrt(n[1:])
        # b on the |n> ladder
        b = np.zeros((self.cutoff + 1, self.cutoff + 1), dtype=complex)
        b[np.arange(self.cutoff), np.arange(1, self.cutoff + 1)] = sq
        m += -(np.conj(self.hop) * b + self.hop * b.conj().T)
        if self.pair != 0:
            b2 = b @ b
            m += np.conj(self.pair) * b2 + self.pair * b2.conj().T
        return m


@dataclass
class SiteSolution:
    psi: complex
    rho: float
    pair_amp: complex        # <b^2>
    energy: float            # includes the const term
    top_weight: float


def solve_site(h):
    """Ground state of the cutoff problem and its mean fields."""
    mat = h.matrix()
    w, v = np.linalg.eigh(mat)
    g = v[:, 0]
    n = np.arange(h.cutoff + 1)
    rho = float(np.real(np.vdot(g, n * g)))
    sq = np.sqrt(n[1:])
    b_g = np.concatenate([sq * g[1:], [0.0]])
    psi = complex(np.vdot(g, b_g))
    b2_g = np.zeros_like(g)
    if h.cutoff >= 2:
        b2_g[: -2] = np.sqrt(n[1:-1] * n[2:]) * g[2:]
    pair = complex(np.vdot(g, b2_g))
    top = float(abs(g[-1]) ** 2)
    if top > SATURATION:
        raise CutoffError(
            f"top Fock level holds {top:.2e} of the weight; raise the cutoff")
    return SiteSolution(psi, rho, pair, float(w[0]) + h.const, top)


def required_cutoff(rho_guess):
    """n_max >= rho + 5 sqrt(rho) (and at least the default)."""
    import math
    return max(DEFAULT_CUTOFF, int(math.ceil(rho_guess + 5 * math.sqrt(max(rho_guess, 1.0)))))

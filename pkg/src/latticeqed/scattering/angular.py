"""Angle-resolved light observables of a lattice gas.

All observables are built from the geometric coefficients
A_i(theta0, theta1) = conj(u_det(x_i)) u_probe(x_i) over K illuminated
sites, with closed forms that assume site-uniform statistics (equal means,
equal pair correlations) and a generic numeric route for explicit states.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..core.lattice import LightMode

SINGULAR_ALPHA = 1e-6


@dataclass
class AngularSweep:
    """A detection-angle grid at fixed probe geometry."""

    theta_probe: float = 0.0
    theta_grid: np.ndarray = None
    k_sites: int = 8
    period: float = 0.5
    wavevector: float = 1.0
    probe_kind: str = "traveling"
    detect_kind: str = "traveling"
    probe_phase: float = 0.0
    detect_phase: float = 0.0

    def __post_init__(self):
        if self.theta_grid is None:
            self.theta_grid = np.linspace(-np.pi, np.pi, 720, endpoint=False)
        self.theta_grid = np.asarray(self.theta_grid, dtype=float)

    def coefficients(self, theta_detect):
        """A_i for one detection angle."""
        x = self.period * np.arange(self.k_sites)
        probe = LightMode(self.probe_kind, self.theta_probe,
                          self.wavevector, self.probe_phase)
        detect = LightMode(self.detect_kind, theta_detect,
                           self.wavevector, self.detect_phase)
        return np.conj(detect.u(x)) * probe.u(x)

    def coefficient_matrix(self):
        """(n_angles, K) matrix of A_i over the grid."""
        return np.stack([self.coefficients(t) for t in self.theta_grid])


def diffraction_kernel(alpha, k_sites):
    """sin^2(K a/2)/sin^2(a/2) with its K^2 limit near a = 0 mod 2 pi."""
    alpha = np.asarray(alpha, dtype=float)
    wrapped = np.mod(alpha + np.pi, 2 * np.pi) - np.pi
    out = np.empty_like(wrapped)
    small = np.abs(wrapped) < SINGULAR_ALPHA
    out[small] = k_sites ** 2
    s = np.sin(wrapped[~small] / 2.0)
    out[~small] = np.sin(k_sites * wrapped[~small] / 2.0) ** 2 / s ** 2
    return out


def quantum_addition(moments, sweep):
    """Intensity in excess of classical diffraction, R(theta1).

    R = <dn_a dn_b> |A|^2 + (<dn^2> - <dn_a dn_b>) sum_i |A_i|^2.
    """
    cov = moments.pair_covariance
    var = moments.onsite_variance
    amat = sweep.coefficient_matrix()
    asum = amat.sum(axis=1)
    asq = (np.abs(amat) ** 2).sum(axis=1)
    r = cov * np.abs(asum) ** 2 + (var - cov) * asq
    return np.real(r)


def quantum_addition_traveling(moments, sweep):
    """Traveling-wave closed form using the diffraction kernel."""
    k0 = 2 * math.pi * sweep.wavevector * sweep.period
    alpha = k0 * (np.sin(sweep.theta_probe) - np.sin(sweep.theta_grid))
    kern = diffraction_kernel(alpha, sweep.k_sites)
    cov = moments.pair_covariance
    var = moments.onsite_variance
    return cov * kern + (var - cov) * sweep.k_sites


def classical_intensity(moments, sweep):
    """|<D>|^2 = n^2 |A|^2, the classical diffraction pattern."""
    asum = sweep.coefficient_matrix().sum(axis=1)
    return moments.n ** 2 * np.abs(asum) ** 2


def quantum_addition_numeric(state, site_couplings, basis):
    """R from an explicit state: sum_ij Ai* Aj <dn_i dn_j>.

    ``site_couplings`` is the (K,) or (n_angles, K) array of A_i.
    """
    amat = np.atleast_2d(np.asarray(site_couplings, dtype=complex))
    k = amat.shape[1]
    w = np.abs(np.asarray(state)) ** 2
    occ = basis.occupations()[:, :k].astype(float)
    means = w @ occ
    cov = (occ * w[:, None]).T @ occ - np.outer(means, means)
    r = np.einsum("ti,tj,ij->t", np.conj(amat), amat, cov)
    r = np.real(r)
    return r[0] if np.ndim(site_couplings) == 1 else r


def incoherent_intensity(moments, wave_kinds="TT", k_sites=1):
    """Phase-averaged intensity p0 K <n^2> for incoherent probing."""
    p0 = {"TT": 1.0, "TS": 0.5, "ST": 0.5, "SS": 0.25}[wave_kinds]
    return p0 * k_sites * moments.n2


def quadrature_variance(moments, sweep, lo_phase=0.0):
    """(Delta X^D_beta)^2 with A_i -> |A_i| cos(arg A_i - beta)."""
    amat = sweep.coefficient_matrix()
    ab = np.abs(amat) * np.cos(np.angle(amat) - lo_phase)
    asum = ab.sum(axis=1)
    asq = (ab ** 2).sum(axis=1)
    cov = moments.pair_covariance
    var = moments.onsite_variance
    return cov * asum ** 2 + (var - cov) * asq


def _pattern_sums(amat):
    a1 = amat.sum(axis=1)                       # sum A_i
    a2 = (amat ** 2).sum(axis=1)                # sum A_i^2
    aa = (np.abs(amat) ** 2).sum(axis=1)        # sum |A_i|^2
    aaa = (np.abs(amat) ** 2 * amat).sum(axis=1)  # sum |A_i|^2 A_i
    a4 = (np.abs(amat) ** 4).sum(axis=1)        # sum |A_i|^4
    return a1, a2, aa, aaa, a4


def intensity_squared_expectation(moments, sweep):
    """<D'^2 D^2> from the four-point closed form (distinct-site moments)."""
    amat = sweep.coefficient_matrix()
    a1, a2, aa, aaa, a4 = _pattern_sums(amat)
    m4 = moments.nanbncnd
    m211 = moments.na2nbnc
    m31 = moments.na3nb
    m22 = moments.na2nb2
    mn4 = moments.n4

    t1 = np.abs(a1) ** 4 * m4
    t2 = 2 * np.real(aaa * np.conj(a1)) * 2 * (2 * m4 - 3 * m211 + m31)
    t3 = 2 * np.real(a2 * np.conj(a1) ** 2) * (-m4 + m211)
    t4 = 2 * aa ** 2 * (m4 - 2 * m211 + m22)
    t5 = np.abs(a2) ** 2 * (m4 - 2 * m211 + m22)
    t6 = 4 * np.abs(a1) ** 2 * aa * (-m4 + m211)
    t7 = a4 * (-6 * m4 + 12 * m211 - 4 * m31 - 3 * m22 + mn4)
    return np.real(t1 + t2 + t3 + t4 + t5 + t6 + t7)


def intensity_expectation(moments, sweep):
    """<D' D> = <n_a n_b>|A|^2 + (<n^2> - <n_a n_b>) sum |A_i|^2."""
    amat = sweep.coefficient_matrix()
    asum = amat.sum(axis=1)
    asq = (np.abs(amat) ** 2).sum(axis=1)
    return np.real(moments.nanb * np.abs(asum) ** 2
                   + (moments.n2 - moments.nanb) * asq)


def photon_number_variance(moments, sweep):
    """(Delta |D|^2)^2 = <D'^2 D^2> - <D' D>^2 over the sweep."""
    return (intensity_squared_expectation(moments, sweep)
            - intensity_expectation(moments, sweep) ** 2)


def intensity_squared_direct(moments, coeffs):
    """Brute-force four-index sum over coincidence patterns (test oracle).

    O(K^4); intended for small K. ``coeffs`` is a single A_i vector.
    """
    a = np.asarray(coeffs, dtype=complex)
    k = len(a)
    total = 0.0 + 0j

    def mom(indices):
        counts = {}
        for ix in indices:
            counts[ix] = counts.get(ix, 0) + 1
        pattern = tuple(sorted(counts.values(), reverse=True))
        if pattern == (1,) * len(pattern) and len(pattern) == 2:
            return moments.nanb
        table = {
            (4,): moments.n4,
            (3, 1): moments.na3nb,
            (2, 2): moments.na2nb2,
            (2, 1, 1): moments.na2nbnc,
            (1, 1, 1, 1): moments.nanbncnd,
            (2,): moments.n2,
            (1, 1): moments.nanb,
            (1,): moments.n,
        }
        return table[pattern]

    for i in range(k):
        for j in range(k):
            for p in range(k):
                for q in range(k):
                    total += (np.conj(a[i]) * np.conj(a[j]) * a[p] * a[q]
                              * mom((i, j, p, q)))
    return float(np.real(total))

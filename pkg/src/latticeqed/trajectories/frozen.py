"""Conditional dynamics with tunneling frozen during detection.

With the atomic configuration frozen, each number eigenvalue z scatters a
coherent field alpha_z, and after m detections in dimensionless time tau
the number distribution is reshaped by |alpha_z|^{2m} exp(-|alpha_z|^2 tau)
(times units: tau = 2 |C|^2 kappa t for transverse probing).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import stream


@dataclass
class FrozenSolution:
    z_grid: np.ndarray
    probabilities: np.ndarray
    amplitudes: np.ndarray
    m_counts: int
    tau: float
    case: str

    def variance(self):
        mean = np.dot(self.probabilities, self.z_grid)
        return float(np.dot(self.probabilities, (self.z_grid - mean) ** 2))

    def peak_positions(self):
        p = self.probabilities
        inner = np.where((p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:]))[0] + 1
        if len(inner) == 0:
            inner = np.array([int(np.argmax(p))])
        return self.z_grid[inner]


def gaussian_prior(z_grid, center, sigma):
    p = np.exp(-(np.asarray(z_grid, dtype=float) - center) ** 2 / (2 * sigma ** 2))
    return p / p.sum()


def frozen_solution(p0, z_grid, case, m_counts, tau, kappa_ratio=None,
                    z_probe=None):
    """Reshaped number distribution after m detections at time tau.

    case='max': p ~ z^{2m} exp(-z^2 tau) p0 (z = number at the probed sites)
    case='min': same weight with z the odd/even number difference
    case='transmission': Lorentzian-response weight centred at z_probe with
    half-width kappa_ratio = kappa / U11 and tau the dimensionless time.
    """
    if m_counts < 0 or tau < 0:
        raise ValueError("m and tau must be non-negative")
    z = np.asarray(z_grid, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    if case in ("max", "min"):
        logw = 2 * m_counts * np.log(np.maximum(np.abs(z), 1e-300)) - z ** 2 * tau
        if m_counts == 0:
            logw = -z ** 2 * tau
        amps = z.astype(complex)          # alpha_z / C
    elif case == "transmission":
        if kappa_ratio is None or z_probe is None:
            raise ValueError("transmission case needs kappa_ratio and z_probe")
        lor = (z - z_probe) ** 2 + kappa_ratio ** 2
        logw = -tau * kappa_ratio ** 2 / lor - m_counts * np.log(lor)
        amps = kappa_ratio / (1j * (z - z_probe) + kappa_ratio)
    else:
        raise ValueError(f"unknown case {case!r}")
    logw -= logw.max()
    p = np.exp(logw) * p0
    s = p.sum()
    if s <= 0:
        raise ValueError("distribution annihilated; inconsistent m, tau")
    return FrozenSolution(z, p / s, amps, m_counts, tau, case)


def collapse_peak(m_counts, tau):
    """Peak position sqrt(m/tau) of the max/min-case weight."""
    return math.sqrt(m_counts / tau)


def collapse_fwhm(tau):
    """FWHM sqrt(2 ln 2 / tau) of the collapsing peak (narrow-peak limit)."""
    return math.sqrt(2 * math.log(2) / tau)


def doublet_splitting(kappa_ratio, m_counts, tau):
    """Transmission satellites z_p +/- dz; None when the singlet forms."""
    if m_counts <= 0 or tau / m_counts <= 1:
        return None
    return kappa_ratio * math.sqrt(tau / m_counts - 1.0)


# ----------------------------------------------------------------------
# closed-form photocount sampling for macroscopic initial distributions
# ----------------------------------------------------------------------

def analytic_qmc(n_atoms, sigma, case, d_tau, n_steps, seed,
                 k_fraction=None, rng=None):
    """Photocount record m(tau) sampled from the closed-form rates.

    case='min': centred prior exp(-z^2/sigma^2); the next-count probability
    is (m + 1/2) / (tau + 1/sigma^2) * d_tau.
    case='max': prior exp(-(z-z0)^2 / (2 sigma^2)) with z0 = N k_fraction;
    the rate follows the two-parameter series in (a, b) below.
    """
    rng = rng or stream(seed)
    taus = np.zeros(n_steps + 1)
    ms = np.zeros(n_steps + 1, dtype=int)
    m, tau = 0, 0.0
    if case == "max":
        if k_fraction is None:
            raise ValueError("max case needs the illuminated fraction K/M")
        z0 = n_atoms * k_fraction

    for step in range(n_steps):
        if case == "min":
            p_next = (m + 0.5) / (tau + 1.0 / sigma ** 2) * d_tau
        elif case == "max":
            p = tau + 1.0 / (2 * sigma ** 2)
            a = z0 / (2 * sigma ** 2 * p)
            b = p * sigma ** 4 / z0 ** 2
            ratio = math.exp(_log_series(m + 1, b) - _log_series(m, b))
            p_next = (2 * m + 1) * (2 * m + 2) * a ** 2 * ratio * d_tau
        else:
            raise ValueError(f"unknown case {case!r}")
        if rng.uniform() < p_next:
            m += 1
        tau += d_tau
        taus[step + 1] = tau
        ms[step + 1] = m
    return taus, ms


def _log_series(m, b):
    """log of sum_{k=0}^{m} b^k / ((2m - 2k)! k!), via log-sum-exp."""
    from math import lgamma, log
    terms = [k * log(max(b, 1e-300))
             - lgamma(2 * m - 2 * k + 1) - lgamma(k + 1)
             for k in range(m + 1)]
    mx = max(terms)
    return mx + math.log(sum(math.exp(t - mx) for t in terms))


# ----------------------------------------------------------------------
# macroscopic superposition bookkeeping
# ----------------------------------------------------------------------

@dataclass
class CatState:
    components: tuple            # the two number eigenvalues
    amplitudes: tuple            # component weights (normalized)
    relative_phase: float        # phase between the components

    def symmetric(self):
        return abs((self.relative_phase + math.pi) % (2 * math.pi) - math.pi) < 1e-9


def cat_assembler(z1, m_counts, case, phase_shift=0.0, drift_phase=0.0,
                  weights=(0.5, 0.5)):
    """Two-component superposition after conditioned detection.

    case='min': components +/- z1, relative phase pi * m (sign (-1)^m).
    case='transmission': components z_p +/- dz with relative phase
    2 (m * phase_shift + drift_phase) where phase_shift is the per-count
    light phase and drift_phase the accumulated deterministic phase.
    """
    w = np.sqrt(np.asarray(weights, dtype=float))
    w /= np.linalg.norm(w)
    if case == "min":
        phase = math.pi * (m_counts % 2)
        comps = (z1, -z1)
    elif case == "transmission":
        phase = 2.0 * (m_counts * phase_shift + drift_phase)
        comps = (z1[0], z1[1]) if np.ndim(z1) else (z1, -z1)
    else:
        raise ValueError(f"unknown case {case!r}")
    return CatState(comps, (float(w[0]), float(w[1])), float(phase))


def transmission_count_phase(splitting, kappa_ratio):
    """Per-count light phase -arctan(dz / (kappa/U11)) of the doublet."""
    return -math.atan(splitting / kappa_ratio)


def transmission_drift_rate(alpha_sq, splitting, u11):
    """Deterministic phase rate |alpha|^2 U11 dz of the doublet."""
    return alpha_sq * u11 * splitting


def purity_after_losses(n_lost, phase_shift):
    """Purity of the mixture left by L uncounted detections."""
    ell = n_lost
    if abs(math.sin(phase_shift)) < 1e-15:
        return 1.0
    frac = math.sin((ell + 1) * phase_shift) ** 2 / (
        (ell + 1) ** 2 * math.sin(phase_shift) ** 2)
    return 0.5 * (1.0 + frac)


def traced_purity(alpha_abs, phase_shift):
    """Purity of the atomic state with the light traced out unobserved."""
    return 0.5 * (1.0 + math.exp(-4.0 * alpha_abs ** 2
                                 * math.sin(phase_shift) ** 2))


# ----------------------------------------------------------------------
# photon statistics of the conditioned field
# ----------------------------------------------------------------------

def cavity_photon_distribution(n_grid, alphas, p_z):
    """p(n) = sum_z Poisson(n; |alpha_z|^2) p(z)."""
    from scipy.stats import poisson
    n = np.asarray(n_grid)
    inten = np.abs(np.asarray(alphas)) ** 2
    return (poisson.pmf(n[:, None], inten[None, :])
            * np.asarray(p_z)[None, :]).sum(axis=1)


def photocount_distribution(m_grid, alphas, p_z, kappa, t):
    """P(m, t) over an initial distribution (ensemble statistics)."""
    from scipy.stats import poisson
    mean = 2 * kappa * np.abs(np.asarray(alphas)) ** 2 * t
    m = np.asarray(m_grid)
    return (poisson.pmf(m[:, None], mean[None, :])
            * np.asarray(p_z)[None, :]).sum(axis=1)


def conditioned_photocount_distribution(m_grid, alphas, p_z_at_t0, kappa, dt):
    """P(m) for the window after a conditioning time (same form, later prior)."""
    return photocount_distribution(m_grid, alphas, p_z_at_t0, kappa, dt)


def mandel_q(p_n, n_grid=None):
    p = np.asarray(p_n, dtype=float)
    n = np.arange(len(p)) if n_grid is None else np.asarray(n_grid)
    mean = np.dot(p, n)
    var = np.dot(p, (n - mean) ** 2)
    if mean <= 0:
        return 0.0
    return float(var / mean - 1.0)


def nonlinear_component_phase(n_k, coupling_abs, detuning, t):
    """Accumulated phase -Delta_p |C|^2 N_K^2 t of a number component."""
    return -detuning * coupling_abs ** 2 * np.asarray(n_k, dtype=float) ** 2 * t


def nonlinear_phase_full(n_k, coupling_abs, detuning, t):
    """Same phase from the un-approximated lossless evolution.

    Phi(t) = -i Dp |C D|^2 t + i |C D|^2 sin(Dp t); the imaginary part of
    the exponent is returned (the component phase).
    """
    dsq = coupling_abs ** 2 * np.asarray(n_k, dtype=float) ** 2
    return -detuning * dsq * t + dsq * np.sin(detuning * t)

"""Cavity transmission spectra that map atom-number distributions.

A dispersively shifted mode resonates at a detuning proportional to the
measured atom number q, so the spectrum is a comb of Lorentzians weighted
by the number distribution p(q); in the bad-cavity limit the comb blurs
into its Gaussian/Voigt envelope.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.stats import binom


@dataclass
class SpectrumResult:
    detuning: np.ndarray
    photon_number: np.ndarray
    envelope_center: float
    envelope_width: float
    mode: str = "single"

    def fitted_envelope(self):
        """Gaussian fit (center, width) to the comb peak heights."""
        return fit_gaussian_envelope(self.detuning, self.photon_number)


def number_distribution_sf(n_atoms, k_sites, m_sites):
    """Binomial p(q): q atoms among K illuminated of M sites."""
    q = np.arange(n_atoms + 1)
    return q, binom.pmf(q, n_atoms, k_sites / m_sites)


def number_distribution_mi(n_k, n_atoms):
    """Delta distribution at the pinned number N_K."""
    q = np.arange(n_atoms + 1)
    p = np.zeros_like(q, dtype=float)
    p[int(round(n_k))] = 1.0
    return q, p


def transmission_spectrum(q_values, p_values, kappa, u11, drive=1.0,
                          mode="single", detuning=None, n_total=None):
    """Photon number versus probe detuning for a distribution over q.

    mode='single': one driven mode, Lorentzians of width kappa at u11*q.
    mode='coupled-max': two modes coupled through N_K = q (splitting u11*q).
    mode='coupled-min': coupling through the odd/even number difference q,
    dispersive shift from the full atom number ``n_total``.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    q = np.asarray(q_values, dtype=float)
    p = np.asarray(p_values, dtype=float)
    norm = p.sum()
    if not math.isclose(norm, 1.0, rel_tol=1e-6, abs_tol=1e-9):
        raise ValueError("distribution must be normalized")

    if detuning is None:
        center, width = _envelope_parameters(q, p, u11, mode, n_total)
        span = max(6 * width, 8 * kappa, 4 * u11)
        detuning = np.linspace(center - span, center + span, 4001)
    detuning = np.asarray(detuning, dtype=float)

    if mode == "single":
        shifts = u11 * q
        spec = (p[None, :] * drive ** 2
                / ((detuning[:, None] - shifts[None, :]) ** 2 + kappa ** 2)
                ).sum(axis=1)
    elif mode == "coupled-max":
        dp = detuning[:, None] - u11 * q[None, :]
        num = u11 ** 2 * q[None, :] ** 2 * drive ** 2
        den = (dp ** 2 - u11 ** 2 * q[None, :] ** 2 - kappa ** 2) ** 2 \
            + 4 * kappa ** 2 * dp ** 2
        spec = (p[None, :] * num / den).sum(axis=1)
    elif mode == "coupled-min":
        if n_total is None:
            raise ValueError("coupled-min needs the total atom number")
        dp = detuning[:, None] - u11 * n_total
        num = u11 ** 2 * q[None, :] ** 2 * drive ** 2
        den = (dp ** 2 - u11 ** 2 * q[None, :] ** 2 - kappa ** 2) ** 2 \
            + 4 * kappa ** 2 * dp ** 2
        spec = (p[None, :] * num / den).sum(axis=1)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    center, width = _envelope_parameters(q, p, u11, mode, n_total)
    return SpectrumResult(detuning, spec, center, width, mode)


def _envelope_parameters(q, p, u11, mode, n_total):
    mean_q = float(np.dot(p, q))
    var_q = float(np.dot(p, (q - mean_q) ** 2))
    if mode == "single":
        return u11 * mean_q, u11 * math.sqrt(max(var_q, 0.0))
    if mode == "coupled-max":
        return 2 * u11 * mean_q, 2 * u11 * math.sqrt(max(var_q, 0.0))
    return u11 * (n_total or 0), u11 * math.sqrt(max(var_q, 0.0))


def voigt_envelope(detuning, center, sigma, kappa, drive=1.0, rtol=1e-8):
    """Bad-cavity limit: Gaussian weight under a Lorentzian response."""
    detuning = np.atleast_1d(np.asarray(detuning, dtype=float))
    out = np.empty_like(detuning)
    norm = 1.0 / (math.sqrt(2 * math.pi) * sigma)
    for i, dp in enumerate(detuning):
        val, _ = integrate.quad(
            lambda w: norm * math.exp(-(w - center) ** 2 / (2 * sigma ** 2))
            * drive ** 2 / ((dp - w) ** 2 + kappa ** 2),
            center - 8 * sigma, center + 8 * sigma,
            epsrel=rtol, limit=200)
        out[i] = val
    return out


def fit_gaussian_envelope(detuning, photon_number):
    """Least-squares Gaussian (center, sigma) through the comb maxima."""
    d = np.asarray(detuning)
    y = np.asarray(photon_number)
    # comb peak samples: local maxima above a hundredth of the global max
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    peaks = np.where(inner & (y[1:-1] > 0.01 * y.max()))[0] + 1
    if len(peaks) < 3:
        peaks = np.argsort(y)[-5:]
    xd, yd = d[peaks], y[peaks]

    def model(x, amp, center, sigma):
        return amp * np.exp(-(x - center) ** 2 / (2 * sigma ** 2))

    a0 = yd.max()
    c0 = xd[np.argmax(yd)]
    s0 = max(np.std(xd), 1e-6)
    popt, _ = optimize.curve_fit(model, xd, yd, p0=(a0, c0, s0), maxfev=20000)
    return float(popt[1]), float(abs(popt[2]))


def spectrum_area(result):
    """Integral over detuning; proportional to sum_q p(q) for one mode."""
    return float(np.trapezoid(result.photon_number, result.detuning))

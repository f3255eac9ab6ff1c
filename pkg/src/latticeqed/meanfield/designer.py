"""Light-geometry designer for synthetic mode-mode interactions.

A single probe/cavity pair gives the cosine profile
W_ij = cos[(k_c - k_p) (r_i - r_j)]; R probes into one cavity give
W_ij ~ V_i* V_j with V_j the probe-amplitude transform (position
dependent); R cavities fed by one probe give W_ij ~ V_|i-j| (distance
dependent, a cosine-transform profile).
"""

import math
from dataclasses import dataclass

import numpy as np

ANGLE_TOL = 1e-9


class GeometryError(ValueError):
    pass


@dataclass
class InteractionProfile:
    w_matrix: np.ndarray
    r_modes: int
    kind: str
    couplings: np.ndarray = None
    disordered: bool = False

    def distance_dependent(self, tol=1e-10):
        """True when W_ij depends on the separation |i - j| only."""
        n = self.w_matrix.shape[0]
        for d in range(n):
            vals = [self.w_matrix[i, i + d] for i in range(n - d)]
            if np.ptp(np.real(vals)) > tol or np.ptp(np.imag(vals)) > tol:
                return False
        return True


def probe_angle_for_mode(theta_cavity, ratio_lambda_d, ell, r_modes):
    """Angle from cos th_p = cos th_c - (lambda/d)(l/R); error if outside."""
    c = math.cos(theta_cavity) - ratio_lambda_d * ell / r_modes
    if abs(c) > 1 + ANGLE_TOL:
        raise GeometryError(
            f"mode {ell}/{r_modes} needs cos(theta) = {c:.6f}, outside [-1, 1]")
    return math.acos(max(-1.0, min(1.0, c)))


def check_mode_angles(theta_cavity, theta_probes, ratio_lambda_d, r_modes,
                      tol=ANGLE_TOL):
    """Verify the commensurability condition for each probe angle."""
    for ell, th in enumerate(theta_probes, start=1):
        want = math.cos(theta_cavity) - ratio_lambda_d * ell / r_modes
        if abs(math.cos(th) - want) > tol:
            raise GeometryError(
                f"probe {ell} angle breaks the mode condition by "
                f"{abs(math.cos(th) - want):.2e}")
    return True


def single_pair_profile(k_probe, k_cavity, n_sites, period=1.0):
    """W_ij = cos[(k_c - k_p)(r_i - r_j)]; flags incommensurate patterns."""
    dk = (k_cavity - k_probe) * period
    i = np.arange(n_sites)
    w = np.cos(dk * (i[:, None] - i[None, :]))
    ratio = dk / (2 * math.pi)
    # commensurate iff dk d / 2 pi is rational with a small denominator
    disordered = _is_incommensurate(ratio)
    r_modes = _pattern_period(w) if not disordered else n_sites
    return InteractionProfile(w, r_modes, "single", disordered=disordered)


def _is_incommensurate(ratio, max_den=64, tol=1e-9):
    from fractions import Fraction
    frac = Fraction(ratio).limit_denominator(max_den)
    return abs(float(frac) - ratio) > tol


def _pattern_period(w, tol=1e-9):
    """Smallest row-shift period of the site pattern."""
    n = w.shape[0]
    for p in range(1, n):
        if np.abs(w - np.roll(w, p, axis=0)).max() < tol:
            return p
    return n


def multi_probe_profile(probe_amplitudes):
    """W_ij ~ V_i* V_j with V_j = sum_m g_m exp(i 2 pi m j / R)."""
    g = np.asarray(probe_amplitudes, dtype=complex)
    r = len(g)
    j = np.arange(r)
    phases = np.exp(2j * np.pi * np.outer(np.arange(1, r + 1), j) / r)
    v = g @ phases
    w = np.outer(np.conj(v), v)
    return InteractionProfile(np.real(w + np.conj(w.T)) / 2 + 0j * w, r,
                              "multi-probe", couplings=g), v


def design_probe_amplitudes(target_v):
    """Invert V_j = sum_m g_m e^{i 2 pi m j/R} for the probe couplings."""
    v = np.asarray(target_v, dtype=complex)
    r = len(v)
    j = np.arange(r)
    phases = np.exp(2j * np.pi * np.outer(np.arange(1, r + 1), j) / r)
    return np.linalg.solve(phases.T, v)


def multi_cavity_profile(cavity_couplings):
    """W_|i-j| = sum_m g_m cos(pi m (i - j) / R): distance dependent."""
    g = np.asarray(cavity_couplings, dtype=float)
    r = len(g)
    dist = np.arange(r)
    v = np.array([np.sum(g * np.cos(np.pi * np.arange(1, r + 1) * d / r))
                  for d in dist])
    i = np.arange(r)
    w = v[np.abs(i[:, None] - i[None, :])]
    return InteractionProfile(w.astype(complex), r, "multi-cavity",
                              couplings=g), v


def design_cavity_couplings(target_v):
    """Solve the cosine-transform system for the cavity couplings."""
    v = np.asarray(target_v, dtype=float)
    r = len(v)
    mat = np.array([[math.cos(math.pi * m * d / r)
                     for m in range(1, r + 1)] for d in range(r)])
    return np.linalg.solve(mat, v)


def yukawa_profile(r_modes, screening=1.0):
    d = np.arange(1, r_modes + 1).astype(float)
    return np.exp(-screening * d) / d


def morse_profile(r_modes, depth=5.0, center=2.0):
    d = np.arange(1, r_modes + 1).astype(float)
    return depth * ((1 - np.exp(-(d - center))) ** 2 - 1.0)


def bessel_profile(r_modes):
    from scipy.special import y0
    d = np.arange(1, r_modes + 1).astype(float)
    return math.pi * y0(math.pi * d)

"""Measurement-plus-feedback control of a driven spin-light mode.

A linearly responding spin mode X with the light adiabatically eliminated
obeys Xdd + (w_R^2 - 4 w_R g^2 d/(k^2+d^2)) X
      - (4 w_R G g k C_th/(k^2+d^2)) (h * X)(t) = F(t),
with C_th = d cos(th) + k sin(th) and the feedback kernel h(t). The
characteristic polynomial D(w) softens to zero at the critical gain; the
stationary variance <X^2> = (1/4 pi^2) Int S(w)/|D(w)|^2 dw diverges there
with a kernel-tunable exponent.
"""

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import integrate, optimize

from ..trajectories.rng import stream


@dataclass(frozen=True)
class SpinLightModel:
    """Parameters of the linearized spin-light loop (frequencies in w_R)."""

    omega_r: float = 1.0
    coupling: float = 1.0          # g
    kappa: float = 100.0
    detuning: float = 1.0          # cavity-probe detuning delta
    lo_phase: float = math.pi / 4  # homodyne angle theta
    damping: float = 0.0           # optional intrinsic spin damping

    @property
    def c_theta(self):
        return (self.detuning * math.cos(self.lo_phase)
                + self.kappa * math.sin(self.lo_phase))

    @property
    def shifted_freq_sq(self):
        """w_R^2 - 4 w_R g^2 d / (k^2 + d^2)."""
        denom = self.kappa ** 2 + self.detuning ** 2
        return self.omega_r ** 2 - 4 * self.omega_r * self.coupling ** 2 \
            * self.detuning / denom

    @property
    def feedback_prefactor(self):
        """4 w_R g k C_th / (k^2 + d^2) (multiplies G H(w))."""
        denom = self.kappa ** 2 + self.detuning ** 2
        return 4 * self.omega_r * self.coupling * self.kappa * self.c_theta / denom


@dataclass(frozen=True)
class FeedbackResponse:
    """Feedback kernel h(t): delta, power-law, delay comb or exponential."""

    kind: str = "power-law"
    h0: float = 1.0
    t0: float = 1.0
    exponent: float = 1.0          # s for power-law / comb
    delay: float = 1.0             # T for the comb
    decay: float = 1.0             # kappa' for the exponential kernel
    n_teeth: int = 50

    def __post_init__(self):
        if self.kind == "power-law" and self.exponent <= 0:
            raise ValueError("power-law needs exponent s > 0")
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")

    def kernel(self, t):
        """h(t) for t >= 0 (combs excluded: they are distributional)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "power-law":
            return self.h0 * (self.t0 / (t + self.t0)) ** (self.exponent + 1)
        if self.kind == "exponential":
            return self.h0 * np.exp(-self.decay * t)
        if self.kind == "delta":
            raise ValueError("delta kernel has no pointwise values")
        raise ValueError(f"kernel values undefined for {self.kind!r}")

    def transform(self, omega):
        """One-sided transform H(w) = Int_0^inf h(t) e^{-i w t} dt."""
        scalar_in = np.ndim(omega) == 0
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        if self.kind == "delta":
            out = np.full(omega.shape, self.h0, dtype=complex)
        elif self.kind == "exponential":
            out = self.h0 / (1j * omega + self.decay)
        elif self.kind == "delay-comb":
            n = np.arange(1, self.n_teeth + 1)
            weights = self.h0 / n ** (self.exponent + 1)
            out = (weights[None, :]
                   * np.exp(-1j * omega[:, None] * self.delay * n[None, :])
                   ).sum(axis=1)
        elif self.kind == "power-law":
            out = _powerlaw_transform(omega, self.h0, self.t0, self.exponent)
        else:
            raise ValueError(f"unknown kernel {self.kind!r}")
        return out[0] if scalar_in else out

    def static_gain(self):
        """H(0) = Int h dt (h0 t0 / s for the power law)."""
        if self.kind == "power-law":
            return self.h0 * self.t0 / self.exponent
        return complex(self.transform(0.0)).real


def _powerlaw_transform(omega, h0, t0, s):
    """h0 t0 e^{+i w t0} E_{s+1}(i w t0) via the exponential integral."""
    out = np.empty(len(omega), dtype=complex)
    for i, w in enumerate(omega):
        if w == 0.0:
            out[i] = h0 * t0 / s
            continue
        z = 1j * w * t0
        val = mpmath.expint(s + 1, z)
        out[i] = h0 * t0 * complex(mpmath.exp(z) * val)
    return out


def response_transform(response, omega_grid):
    """H(w) on a grid (vectorized front end)."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if not np.all(np.isfinite(omega_grid)):
        raise ValueError("omega grid must be finite")
    return np.atleast_1d(response.transform(omega_grid))


def characteristic_polynomial(model, response, gain, omega):
    """D(w) = w^2 - i Gm w - w~^2 + prefactor * G * H(w).

    Convention: x(t) ~ e^{i w t} with H(w) = Int h(t) e^{-i w t} dt, so the
    intrinsic damping enters with -i Gm w relative to Im H (the kernel's
    own lag damps or anti-damps accordingly). |D| is unchanged at Gm = 0.
    """
    scalar = np.ndim(omega) == 0
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    h = response_transform(response, omega)
    d = (omega ** 2 - 1j * model.damping * omega - model.shifted_freq_sq
         + model.feedback_prefactor * gain * h)
    return d[0] if scalar else d


def characteristic_roots(model, response, gain, omega_grid, n_roots=4):
    """Complex roots of D by damped secant iteration seeded from the grid."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    vals = np.abs(characteristic_polynomial(model, response, gain, omega_grid))
    seeds = omega_grid[np.argsort(vals)[: 3 * n_roots]]
    roots = []
    for w0 in seeds:
        z = complex(w0)
        z_prev = z * 1.01 + 1e-3
        f_prev = _eval_complex(model, response, gain, z_prev)
        for _ in range(80):
            f = _eval_complex(model, response, gain, z)
            if abs(f - f_prev) < 1e-300:
                break
            step = f * (z - z_prev) / (f - f_prev)
            # damped update keeps the iteration near the seed basin
            if abs(step) > 1.0 + abs(z):
                step *= (1.0 + abs(z)) / abs(step)
            z_prev, f_prev = z, f
            z = z - step
            if abs(step) < 1e-12 * max(1.0, abs(z)):
                break
        if abs(_eval_complex(model, response, gain, z)) < 1e-8 * max(
                1.0, model.omega_r ** 2):
            if not any(abs(z - r) < 1e-6 for r in roots):
                roots.append(z)
    return sorted(roots, key=lambda r: abs(r))[:n_roots]


def _eval_complex(model, response, gain, z):
    """D at complex frequency (analytic continuation of H for power law)."""
    if response.kind == "power-law":
        if z == 0:
            h = response.h0 * response.t0 / response.exponent
        else:
            arg = 1j * complex(z) * response.t0
            h = response.h0 * response.t0 * complex(
                mpmath.exp(arg) * mpmath.expint(response.exponent + 1, arg))
    elif response.kind == "delta":
        h = response.h0
    elif response.kind == "exponential":
        h = response.h0 / (1j * complex(z) + response.decay)
    else:
        n = np.arange(1, response.n_teeth + 1)
        h = (response.h0 / n ** (response.exponent + 1)
             * np.exp(-1j * complex(z) * response.delay * n)).sum()
    return (complex(z) ** 2 - 1j * model.damping * complex(z)
            - model.shifted_freq_sq + model.feedback_prefactor * gain * h)


def critical_gain(model, response):
    """Closed form G_crit H(0) = [w_R (k^2+d^2) - 4 g^2 d] / (4 g k C_th)."""
    denom = 4 * model.coupling * model.kappa * model.c_theta
    if abs(denom) < 1e-300:
        return math.inf
    num = (model.omega_r * (model.kappa ** 2 + model.detuning ** 2)
           - 4 * model.coupling ** 2 * model.detuning)
    h0 = response.static_gain()
    return num / (denom * h0)


def critical_gain_numeric(model, response, bracket_scale=10.0):
    """Gain where D(0) = 0, by root finding (cross-check of the formula)."""
    g0 = critical_gain(model, response)
    if not math.isfinite(g0):
        raise ValueError("no transition: C_theta H(0) vanishes")

    def d0(gain):
        return float(np.real(characteristic_polynomial(model, response,
                                                       gain, 0.0)))

    lo, hi = g0 / bracket_scale, g0 * bracket_scale
    if d0(lo) * d0(hi) > 0:
        lo, hi = -abs(g0) * bracket_scale, abs(g0) * bracket_scale
    return optimize.brentq(d0, lo, hi, xtol=1e-14, rtol=1e-14)


def noise_spectrum(model, response, gain, omega):
    """S(w) = pi w_R^2 k |2g + G (k - i d) e^{-i th} H(w)|^2 / (k^2+d^2)."""
    scalar_in = np.ndim(omega) == 0
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    h = response_transform(response, omega)
    amp = (2 * model.coupling
           + gain * (model.kappa - 1j * model.detuning)
           * np.exp(-1j * model.lo_phase) * h)
    s = (math.pi * model.omega_r ** 2 * model.kappa
         * np.abs(amp) ** 2 / (model.kappa ** 2 + model.detuning ** 2))
    return float(s[0]) if scalar_in else s


class DivergentVarianceError(RuntimeError):
    pass


def quadrature_variance_integral(model, response, gain, rel_tol=1e-6,
                                 omega_max=None):
    """<X^2> = (1/4 pi^2) Int S/|D|^2 dw with pole-aware refinement."""
    gcrit = critical_gain(model, response)
    if math.isfinite(gcrit) and gain >= gcrit:
        raise DivergentVarianceError(
            f"gain {gain:.6g} at or above the critical gain {gcrit:.6g}")
    if gain == 0.0 and model.damping == 0.0:
        raise DivergentVarianceError(
            "undamped oscillator under white noise; set a damping rate")

    w_soft = math.sqrt(max(model.shifted_freq_sq, 1e-12))
    omega_max = omega_max or 400.0 * max(w_soft, 1.0)

    def integrand(w):
        d = characteristic_polynomial(model, response, gain, float(w))
        s = noise_spectrum(model, response, gain, float(w))
        return float(s / abs(d) ** 2)

    points = [w_soft, -w_soft, 0.0]
    total = 0.0
    segments = sorted({-omega_max, *points, omega_max})
    for a, b in zip(segments[:-1], segments[1:]):
        val, _ = integrate.quad(integrand, a, b, epsrel=rel_tol, limit=400)
        total += val
    return total / (4 * math.pi ** 2)


@dataclass
class CriticalityReport:
    gain_critical: float
    roots: list
    gains: np.ndarray
    variances: np.ndarray
    amplitude: float
    offset: float
    exponent: float
    residual: float


def critical_exponent_fit(model, response, n_samples=12,
                          window=(1e-3, 1e-1), rel_tol=1e-6):
    """Fit <X^2> = A/|1 - G/G_crit|^alpha + B near the transition."""
    gcrit = critical_gain(model, response)
    eps = np.geomspace(window[0], window[1], n_samples)
    gains = gcrit * (1.0 - eps)
    variances = np.array([
        quadrature_variance_integral(model, response, g, rel_tol=rel_tol)
        for g in gains])
    amp, off, alpha, resid = fit_divergence(eps, variances)
    roots = characteristic_roots(model, response, 0.9 * gcrit,
                                 np.linspace(-3 * model.omega_r,
                                             3 * model.omega_r, 61))
    return CriticalityReport(gcrit, roots, gains, variances,
                             amp, off, alpha, resid)


def fit_divergence(eps, variances):
    """Least squares for (A, B, alpha) in A / eps^alpha + B.

    Separable: for fixed alpha the pair (A, B) is a linear solve, so the
    exponent is found by scalar minimization over alpha (robust against
    flat or B-dominated samples).
    """
    eps = np.asarray(eps, dtype=float)
    y = np.asarray(variances, dtype=float)
    scale = np.abs(y).max()

    def sub_fit(alpha):
        x = eps ** (-alpha)
        design = np.stack([x, np.ones_like(x)], axis=1)
        coef, *_ = np.linalg.lstsq(design, y / scale, rcond=None)
        resid = design @ coef - y / scale
        return coef * scale, float(np.sqrt(np.mean(resid ** 2)))

    grid = np.linspace(0.01, 4.0, 160)
    errs = [sub_fit(a)[1] for a in grid]
    i0 = int(np.argmin(errs))
    lo = grid[max(i0 - 1, 0)]
    hi = grid[min(i0 + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(lambda a: sub_fit(a)[1],
                                   bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    alpha = float(res.x)
    (amp, off), err = sub_fit(alpha)
    rel = err * scale / np.mean(y)
    return float(amp), float(off), alpha, float(rel)


# ----------------------------------------------------------------------
# conditioned trajectories of the linear model
# ----------------------------------------------------------------------

def synthesize_noise(model, response, gain, n_steps, dt, rng):
    """Real noise with the (symmetrized) spectral density of the loop.

    Spectral factorization: Fourier amplitudes are drawn with
    <|F(w)|^2> matching P(w) = (S(w) + S(-w)) / (4 pi), which leaves the
    stationary variance integral unchanged (|D| is even).
    """
    freqs = np.fft.rfftfreq(n_steps, dt) * 2 * math.pi
    s_plus = noise_spectrum(model, response, gain, freqs)
    s_minus = noise_spectrum(model, response, gain, -freqs)
    psd = (np.asarray(s_plus) + np.asarray(s_minus)) / (4 * math.pi)
    amps = np.sqrt(psd * n_steps / (2 * dt))
    xi = (rng.normal(size=len(freqs)) + 1j * rng.normal(size=len(freqs)))
    coeffs = amps * xi
    coeffs[0] = coeffs[0].real * math.sqrt(2)
    if n_steps % 2 == 0:
        coeffs[-1] = coeffs[-1].real * math.sqrt(2)
    return np.fft.irfft(coeffs, n_steps)


def conditional_linear_run(model, response, gain, dt, t_final, seed,
                           x0=0.1, v0=0.0, rng=None, noise_scale=1.0,
                           kernel_floor=1e-8):
    """Integrate the memory-kernel equation with spectrally colored noise.

    The noise realization carries the loop's spectral density (white
    light noise plus the kernel-filtered part and their cross term).
    """
    rng = rng or stream(seed)
    n_steps = int(round(t_final / dt))
    kernel_cut = None
    if response.kind == "power-law":
        # truncate the history where h < kernel_floor * h(0)
        t_tail = response.t0 * ((1.0 / kernel_floor)
                                ** (1.0 / (response.exponent + 1)) - 1.0)
        kernel_cut = min(int(t_tail / dt) + 1, n_steps)
    elif response.kind == "exponential":
        kernel_cut = min(int(18.4 / (response.decay * dt)) + 1, n_steps)
    elif response.kind == "delta":
        kernel_cut = 1
    else:
        kernel_cut = n_steps
    tgrid = np.arange(kernel_cut) * dt
    if response.kind == "delta":
        kvals = np.array([response.h0 / dt])
    else:
        kvals = response.kernel(tgrid)

    kvals_rev = kvals[::-1].copy()
    if noise_scale:
        force = noise_scale * synthesize_noise(model, response, gain,
                                               n_steps, dt, rng)
    else:
        force = np.zeros(n_steps)
    hist_x = np.zeros(n_steps)

    def convolve(step):
        # kernel against the trailing history, contiguous views only
        lag = min(step + 1, kernel_cut)
        lo = step + 1 - lag
        return np.dot(kvals_rev[kernel_cut - lag:], hist_x[lo:step + 1]) * dt

    pref = model.feedback_prefactor * gain
    w2 = model.shifted_freq_sq
    out_x = np.empty(n_steps + 1)
    out_x[0] = x0
    x, v = x0, v0
    for step in range(n_steps):
        conv_x = convolve(step - 1) if step else 0.0
        acc = -w2 * x - model.damping * v + pref * conv_x + force[step]
        v = v + dt * acc
        x = x + dt * v
        hist_x[step] = x
        out_x[step + 1] = x
    return np.arange(n_steps + 1) * dt, out_x


def synthetic_divergence_samples(gcrit, alpha, amp, offset, eps):
    """Planted-ansatz data for fit validation."""
    return amp / eps ** alpha + offset


# ----------------------------------------------------------------------
# single nonlinear spin under the same loop
# ----------------------------------------------------------------------

def nonlinear_spin_run(model, response, gain, dt, t_final, seed,
                       sx0=0.05, rng=None, kernel_floor=1e-8,
                       noise_scale=1.0):
    """Semiclassical stochastic spin with length projection to 3/4.

    ``noise_scale=0`` integrates the deterministic skeleton (the
    mean-field transition curve)."""
    rng = rng or stream(seed)
    n_steps = int(round(t_final / dt))
    radius = math.sqrt(3.0) / 2.0
    s = np.array([sx0, 0.0, -math.sqrt(max(radius ** 2 - sx0 ** 2, 0.0))])

    if response.kind == "delta":
        kernel_cut, kvals = 1, np.array([response.h0 / dt])
    else:
        t_tail = (response.t0 * ((1.0 / kernel_floor)
                                 ** (1.0 / (response.exponent + 1)) - 1.0)
                  if response.kind == "power-law"
                  else -math.log(kernel_floor) / max(response.decay, 1e-12))
        kernel_cut = min(int(t_tail / dt) + 1, n_steps)
        kvals = response.kernel(np.arange(kernel_cut) * dt)

    hist_sx = np.zeros(kernel_cut)
    hist_f = np.zeros(kernel_cut, dtype=complex)
    f = (rng.normal(size=n_steps) + 1j * rng.normal(size=n_steps)) \
        * math.sqrt(model.kappa / (2 * dt)) * noise_scale
    denom = model.kappa ** 2 + model.detuning ** 2
    cplx = (model.kappa - 1j * model.detuning) * np.exp(-1j * model.lo_phase)
    sx_t = np.empty(n_steps + 1)
    sx_t[0] = s[0]
    for step in range(n_steps):
        hist_f[1:] = hist_f[:-1]
        hist_f[0] = f[step]
        conv_f = np.dot(kvals, hist_f) * dt
        conv_sx = np.dot(kvals, hist_sx) * dt
        noise = -model.omega_r * (model.coupling * f[step]
                                  + 0.5 * gain * cplx * conv_f) \
            / (model.kappa + 1j * model.detuning)
        drive = -(4 * model.coupling ** 2 * model.detuning * s[0]
                  + 4 * model.coupling * model.kappa * gain
                  * model.c_theta * conv_sx) / denom \
            - 2 * np.real(noise) / model.omega_r
        ds = np.array([
            -model.omega_r * s[1],
            model.omega_r * s[0] - 2.0 * drive * s[2],
            2.0 * drive * s[1],
        ])
        s = s + dt * ds
        s *= radius / np.linalg.norm(s)
        hist_sx[1:] = hist_sx[:-1]
        hist_sx[0] = s[0]
        sx_t[step + 1] = s[0]
    return np.arange(n_steps + 1) * dt, sx_t


# ----------------------------------------------------------------------
# condensate parameter mapping
# ----------------------------------------------------------------------

HBAR = 1.054571817e-34


def bec_parameter_map(pump_rabi, mode_coupling, atom_detuning, n_atoms,
                      mode_freq, pump_freq, mode_wavevector, atom_mass):
    """SI-unit map onto the spin-light model.

    delta = w_mode - w_pump + N g1^2 / (2 Delta_a); w_R = hbar k1^2 / (2 m);
    g = Omega_pump g1 sqrt(N/2) / Delta_a; feedback scale sqrt(N/8) V0(t).
    All inputs in rad/s (couplings too), mass in kg, wavevector in 1/m.
    """
    delta = mode_freq - pump_freq + n_atoms * mode_coupling ** 2 \
        / (2 * atom_detuning)
    omega_r = HBAR * mode_wavevector ** 2 / (2 * atom_mass)
    g = pump_rabi * mode_coupling * math.sqrt(n_atoms / 2.0) / atom_detuning
    feedback_scale = math.sqrt(n_atoms / 8.0)
    return {
        "detuning": delta,
        "omega_r": omega_r,
        "coupling": g,
        "feedback_scale": feedback_scale,
    }

import math

import numpy as np
import pytest
from scipy.integrate import quad

from latticeqed.feedback import (FeedbackResponse, SpinLightModel,
                                 bec_parameter_map, characteristic_polynomial,
                                 characteristic_roots, critical_gain,
                                 critical_gain_numeric, fit_divergence,
                                 locked_intensity, markovian_feedback_run,
                                 critical_gain_markovian, noise_spectrum,
                                 nonlinear_spin_run,
                                 quadrature_variance_integral,
                                 response_transform, spectral_peak,
                                 synthetic_divergence_samples,
                                 tuned_frequency)
from latticeqed.feedback.fpt import DivergentVarianceError
from latticeqed.trajectories import stream


def test_response_transform_static_gain_and_delta():
    r = FeedbackResponse("power-law", h0=2.0, t0=1.0, exponent=2.0)
    assert r.static_gain() == pytest.approx(1.0)
    d = FeedbackResponse("delta", h0=1.3)
    w = np.linspace(-3, 3, 7)
    assert np.allclose(response_transform(d, w), 1.3)


def test_response_transform_vs_quadrature():
    r = FeedbackResponse("power-law", h0=1.0, t0=0.7, exponent=1.4)
    for w in (0.2, 2.0, 25.0):
        re_part = quad(lambda t: r.kernel(t) * math.cos(w * t), 0, 400,
                       limit=4000)[0]
        im_part = -quad(lambda t: r.kernel(t) * math.sin(w * t), 0, 400,
                        limit=4000)[0]
        h = complex(r.transform(w))
        assert h.real == pytest.approx(re_part, abs=5e-6)
        assert h.imag == pytest.approx(im_part, abs=5e-6)


def test_subohmic_low_frequency_scaling():
    r = FeedbackResponse("power-law", h0=0.5, t0=1.0, exponent=0.5)
    w = np.array([1e-5, 1e-4, 1e-3])
    im = np.abs(np.imag(response_transform(r, w)))
    slopes = np.diff(np.log(im)) / np.diff(np.log(w))
    assert np.abs(slopes - 0.5).max() < 0.05 * 0.5 + 0.03


def test_power_law_rejects_bad_exponent():
    with pytest.raises(ValueError):
        FeedbackResponse("power-law", exponent=0.0)


def test_characteristic_polynomial_and_roots():
    m = SpinLightModel()
    r = FeedbackResponse("power-law", h0=5.0, t0=1.0, exponent=5.0)
    # no feedback: quadratic roots
    d0 = characteristic_polynomial(m, r, 0.0, 0.0)
    assert complex(d0).real == pytest.approx(-m.shifted_freq_sq)
    roots = characteristic_roots(m, r, 0.0,
                                 np.linspace(-2.5, 2.5, 41))
    w_soft = math.sqrt(m.shifted_freq_sq)
    assert any(abs(abs(z.real) - w_soft) < 1e-6 for z in roots)
    # softening toward the transition
    gcrit = critical_gain(m, r)
    mags = []
    for frac in (0.5, 0.8, 0.95):
        rr = characteristic_roots(m, r, frac * gcrit,
                                  np.linspace(-2.5, 2.5, 41))
        mags.append(min(abs(z) for z in rr))
    assert mags[0] > mags[1] > mags[2]
    # D(0) vanishes exactly at the critical gain
    assert abs(characteristic_polynomial(m, r, gcrit, 0.0)) < 1e-10


def test_critical_gain_random_sweep():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        m = SpinLightModel(omega_r=1.0,
                           coupling=rng.uniform(0.2, 3.0),
                           kappa=rng.uniform(5.0, 200.0),
                           detuning=rng.uniform(-3.0, 3.0),
                           lo_phase=rng.uniform(0.2, 1.2))
        r = FeedbackResponse("power-law", h0=rng.uniform(0.5, 3.0),
                             t0=rng.uniform(0.5, 2.0),
                             exponent=rng.uniform(0.4, 5.0))
        g_closed = critical_gain(m, r)
        g_numeric = critical_gain_numeric(m, r)
        worst = max(worst, abs(g_closed - g_numeric) / abs(g_closed))
    assert worst < 1e-6


def test_critical_gain_degenerate_cases():
    r = FeedbackResponse("delta")
    no_transition = SpinLightModel(lo_phase=math.atan2(-1.0, 100.0))
    assert math.isinf(critical_gain(no_transition, r))
    # numerator zero: delta = omega_r (kappa^2 + delta^2) / (4 g^2)
    m0 = SpinLightModel(omega_r=1.0, coupling=5.0, kappa=2.0,
                        detuning=(2.0 ** 2 + 1.0) / (4 * 25.0))
    # solve detuning self-consistently is awkward; check the sign change
    assert critical_gain(m0, r) < critical_gain(SpinLightModel(
        omega_r=1.0, coupling=5.0, kappa=2.0, detuning=0.0), r)


def test_noise_spectrum_properties():
    m = SpinLightModel()
    r = FeedbackResponse("power-law", h0=1.0, t0=1.0, exponent=1.0)
    w = np.linspace(-5, 5, 101)
    s0 = noise_spectrum(m, r, 0.0, w)
    assert np.ptp(s0) < 1e-12          # white at zero gain
    s1 = noise_spectrum(m, r, 0.5 * critical_gain(m, r), w)
    assert np.all(s1 >= 0)
    assert s1.max() / s1.min() > 1.0 + 1e-6
    # theta + pi with G -> -G is invariant
    m2 = SpinLightModel(lo_phase=m.lo_phase + math.pi)
    s2 = noise_spectrum(m2, r, -0.5 * critical_gain(m, r), w)
    assert np.abs(s1 - s2).max() < 1e-10


def test_variance_integral_monotone_near_transition():
    m = SpinLightModel()
    r = FeedbackResponse("power-law", h0=2.0, t0=1.0, exponent=2.0)
    gcrit = critical_gain(m, r)
    values = [quadrature_variance_integral(m, r, f * gcrit)
              for f in (0.9, 0.99, 0.999)]
    assert values[0] < values[1] < values[2]
    with pytest.raises(DivergentVarianceError):
        quadrature_variance_integral(m, r, gcrit)
    with pytest.raises(DivergentVarianceError):
        quadrature_variance_integral(m, r, 0.0)
    # a damped model has a finite zero-gain baseline
    m_damped = SpinLightModel(damping=0.05)
    base = quadrature_variance_integral(m_damped, r, 0.0)
    assert math.isfinite(base) and base > 0


def test_variance_scaling_in_coupling():
    # doubling g at fixed ratios rescales the integrand consistently:
    # re-evaluation (the oracle) must match the integral route
    m = SpinLightModel(coupling=1.0, damping=0.02)
    r = FeedbackResponse("power-law", h0=2.0, t0=1.0, exponent=2.0)
    g = 0.5 * critical_gain(m, r)
    direct = quadrature_variance_integral(m, r, g)
    from scipy.integrate import simpson
    w = np.concatenate([np.linspace(-30, 30, 24001),
                        np.geomspace(30, 2000, 2001)[1:],
                        -np.geomspace(30, 2000, 2001)[1:][::-1]])
    w = np.sort(w)
    h = response_transform(r, w)
    d = (w ** 2 - 1j * m.damping * w - m.shifted_freq_sq
         + m.feedback_prefactor * g * h)
    amp = (2 * m.coupling + g * (m.kappa - 1j * m.detuning)
           * np.exp(-1j * m.lo_phase) * h)
    s = (math.pi * m.omega_r ** 2 * m.kappa * np.abs(amp) ** 2
         / (m.kappa ** 2 + m.detuning ** 2))
    riemann = simpson(s / np.abs(d) ** 2, x=w) / (4 * math.pi ** 2)
    assert direct == pytest.approx(riemann, rel=2e-3)


def test_synthetic_fit_recovers_exponent():
    eps = np.geomspace(1e-3, 1e-1, 12)
    y = synthetic_divergence_samples(1.0, 0.77, 2.5, 1.3, eps)
    amp, off, alpha, resid = fit_divergence(eps, y)
    assert alpha == pytest.approx(0.77, abs=1e-3)
    assert amp == pytest.approx(2.5, rel=1e-3)
    assert resid < 1e-9


def test_markovian_formulas():
    assert critical_gain_markovian(0.02, 100) == pytest.approx(0.0025)
    assert locked_intensity(0.02, 0.005) == pytest.approx(5000.0)
    assert tuned_frequency(0.8 * 0.0025, 0.02, 100) == pytest.approx(
        4 * math.sqrt(0.2))
    assert tuned_frequency(0.0025, 0.02, 100) == 0.0


def test_markovian_zero_gain_identical_to_plain_measurement():
    rec_fb = markovian_feedback_run(20, 0.02, 0.0, 5e-4, 2.0, seed=4)
    from latticeqed.trajectories import (JumpChannel, mcwf_run, stream,
                                         twomode_hamiltonian, twomode_jump,
                                         twomode_population,
                                         twomode_superfluid)
    h0 = twomode_hamiltonian(20, 1.0)
    c = twomode_jump(20, 0.02, "difference")
    d = twomode_population(20, "difference")
    rec_plain = mcwf_run(h0, [JumpChannel(c)], twomode_superfluid(20), 5e-4,
                         2.0, seed=4, observables={"d": d, "d_sq": d @ d},
                         record_every=10, rng=stream(4))
    assert np.array_equal(rec_fb.observables["d_sq"],
                          rec_plain.observables["d_sq"])


def test_conditional_linear_run_growth_above_threshold():
    from latticeqed.feedback import conditional_linear_run
    m = SpinLightModel()
    r = FeedbackResponse("power-law", h0=20.0, t0=1.0, exponent=20.0)
    gcrit = critical_gain(m, r)
    growths = []
    for seed in (3, 4):
        t, x = conditional_linear_run(m, r, 1.3 * gcrit, 1e-3, 60.0, seed,
                                      x0=1e-3, noise_scale=0.0)
        tail = np.abs(x[t > 30.0])
        rate = np.polyfit(t[t > 30.0], np.log(np.maximum(tail, 1e-300)), 1)[0]
        growths.append(rate)
    assert growths[0] > 0
    assert growths[0] == pytest.approx(growths[1], rel=0.05)


def test_conditional_linear_run_oscillates_below_threshold():
    m = SpinLightModel(damping=0.02)
    r = FeedbackResponse("power-law", h0=20.0, t0=1.0, exponent=20.0)
    t, x = conditional_linear_run_cached(m, r, 0.0)
    freq, _, _ = spectral_peak(t, x)
    w_soft = math.sqrt(m.shifted_freq_sq)
    assert freq == pytest.approx(w_soft, rel=0.05)
    gcrit = critical_gain(m, r)
    t2, x2 = conditional_linear_run_cached(m, r, 0.97 * gcrit)
    freq2, _, _ = spectral_peak(t2, x2)
    assert freq2 < 0.8 * freq            # visible softening


def conditional_linear_run_cached(m, r, gain):
    from latticeqed.feedback import conditional_linear_run
    return conditional_linear_run(m, r, gain, 2e-3, 400.0, seed=12, x0=0.3,
                                  noise_scale=0.0)


def test_nonlinear_spin_symmetry_breaking():
    m = SpinLightModel(omega_r=1.0, coupling=0.1, kappa=10.0, detuning=1.0,
                       lo_phase=math.pi / 4)
    r = FeedbackResponse("power-law", h0=1.0, t0=1.0, exponent=1.0)
    gcrit = critical_gain(m, r)

    def skeleton(gain, sx0):
        t, sx = nonlinear_spin_run(m, r, gain, 4e-3, 160.0, seed=2, sx0=sx0,
                                   kernel_floor=1e-4, noise_scale=0.0)
        return float(sx[t > 120.0].mean())

    below = [skeleton(g, 0.05) for g in (0.0, 0.5 * gcrit)]
    assert all(abs(b) < 0.01 for b in below)
    branch = [skeleton(g, 0.05) for g in (1.2 * gcrit, 2.0 * gcrit)]
    assert all(b > 0.25 for b in branch)
    assert branch[1] > branch[0]           # monotone just above threshold
    flipped = skeleton(2.0 * gcrit, -0.05)
    assert flipped == pytest.approx(-branch[1], abs=1e-6)
    # the stochastic run stays on the sphere and produces finite output
    t, sxn = nonlinear_spin_run(m, r, 1.5 * gcrit, 4e-3, 20.0, seed=2,
                                sx0=0.05, kernel_floor=1e-4)
    assert np.all(np.abs(sxn) <= math.sqrt(3) / 2 + 1e-9)


def test_bec_parameter_map():
    hbar = 1.054571817e-34
    m_rb = 1.44316060e-25
    lam = 780e-9
    k1 = 2 * math.pi / lam
    out = bec_parameter_map(pump_rabi=2 * math.pi * 1e6,
                            mode_coupling=2 * math.pi * 1e4,
                            atom_detuning=2 * math.pi * 1e9,
                            n_atoms=1e5, mode_freq=0.0, pump_freq=0.0,
                            mode_wavevector=k1, atom_mass=m_rb)
    assert out["omega_r"] == pytest.approx(2 * math.pi * 3770, rel=0.05)
    base = out["coupling"]
    out4 = bec_parameter_map(2 * math.pi * 1e6, 2 * math.pi * 1e4,
                             2 * math.pi * 1e9, 4e5, 0.0, 0.0, k1, m_rb)
    assert out4["coupling"] == pytest.approx(2 * base)
    flipped = bec_parameter_map(2 * math.pi * 1e6, 2 * math.pi * 1e4,
                                -2 * math.pi * 1e9, 1e5, 0.0, 0.0, k1, m_rb)
    assert flipped["detuning"] == pytest.approx(-out["detuning"])


def test_phase_rotation_matches_tuned_frequency():
    from latticeqed.feedback import phase_rotation_run
    n, gamma = 100, 0.02
    z_c = critical_gain_markovian(gamma, n)
    for frac in (0.3, 0.8):
        t, dsq = phase_rotation_run(n, gamma, frac * z_c, 1e-4, 120.0,
                                    seed=1)
        freq, _, _ = spectral_peak(t[::20], dsq[::20], drop_fraction=0.02)
        expect = tuned_frequency(frac * z_c, gamma, n)
        assert abs(freq - expect) / expect < 0.05


def test_fermion_feedback_locks_staggered_magnetization():
    from latticeqed.feedback import (fermion_feedback_run,
                                     locked_magnetization)
    n_sites, gamma = 6, 1.0
    n_total = 6
    z_c = critical_gain_markovian(gamma, n_total)
    z = 4.0 * z_c
    rec = fermion_feedback_run(n_sites, 3, 3, gamma, z, 5e-4, 8.0, seed=2,
                               record_every=200)
    late = rec.times > 4.0
    locked = np.sqrt(rec.observables["m_stag_sq"][late].mean())
    target = locked_magnetization(gamma, z)
    # small systems only take discrete magnetization values
    assert abs(locked - target) / target < 0.5
    # below threshold the trajectory-averaged magnetization stays near zero
    means = []
    for seed in (3, 4, 5):
        rec0 = fermion_feedback_run(n_sites, 3, 3, gamma, 0.1 * z_c, 5e-4,
                                    4.0, seed=seed, record_every=200)
        means.append(rec0.observables["m_stag"].mean())
    assert abs(np.mean(means)) < 0.5


def test_variance_integral_matches_trajectory_ensemble():
    from latticeqed.feedback import (conditional_linear_run,
                                     quadrature_variance_integral)
    m = SpinLightModel(damping=0.5)
    r = FeedbackResponse("power-law", h0=2.0, t0=1.0, exponent=2.0)
    gain = 0.5 * critical_gain(m, r)
    target = quadrature_variance_integral(m, r, gain)
    values = []
    for seed in range(5):
        t, x = conditional_linear_run(m, r, gain, 2e-3, 120.0, seed,
                                      x0=0.0, v0=0.0, kernel_floor=3e-5)
        values.append(np.mean(x[t > 30.0] ** 2))
    mean = np.mean(values)
    serr = np.std(values, ddof=1) / math.sqrt(len(values))
    assert abs(mean - target) < 3.0 * serr

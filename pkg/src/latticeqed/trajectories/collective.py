"""Collective two-mode dynamics of a measured macroscopic gas.

The odd/even mode populations of N delocalized atoms reduce to a Gaussian
wave packet in the imbalance z with width b, imbalance z0 and phases
(phi, c). Between detections the packet obeys four coupled ODEs; each
detection applies an algebraic update map. The detection strength enters
as Gamma = N * gamma_m / 2 where gamma_m is the coefficient of the squared
measured population in c'c (gamma_m = 2 kappa |C|^2 for cavity units).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import root

from .rng import stream


@dataclass
class DoubleWellParams:
    n_atoms: int
    lam: float = 0.0          # interaction scale U N / M
    gamma_big: float = 0.1    # Gamma = N gamma_m / 2
    j_hop: float = 1.0

    @property
    def h(self):
        return 1.0 / self.n_atoms

    @property
    def omega(self):
        return 2.0 * math.sqrt(1.0 + self.lam - self.h)


def initial_packet(params):
    """Balanced superfluid start: b^2 = 2 h, z0 = phi = c = 0."""
    return np.array([2.0 * params.h, 0.0, 0.0, 0.0])


def packet_rhs(state, params):
    """d/dt of (b^2, phi, z0, c) between detections."""
    b2, phi, z0, c = state
    h, j, gam, om = params.h, params.j_hop, params.gamma_big, params.omega
    db2 = 8 * h * j * phi - (gam / (2 * h)) * b2 ** 2
    dphi = (-j * om ** 2 / (4 * h) * b2 - (gam / (2 * h)) * b2 * phi
            + 4 * h * j / b2 * (1 + phi ** 2))
    dz0 = -(gam / (2 * h)) * b2 * (1 + z0) + (2 * h * j / b2) * (2 * z0 * phi + c)
    dc = -(gam / (2 * h)) * b2 * c + (4 * h * j / b2) * (phi * c - 2 * z0)
    return np.array([db2, dphi, dz0, dc])


def jump_map(state):
    """Update of (b^2, phi, z0, c) at one detection."""
    b2, phi, z0, c = state
    den = (1 + z0) ** 2 + b2
    shrink = (1 + z0) ** 2 / den
    return np.array([b2 * shrink, phi * shrink,
                     z0 + b2 * (1 + z0) / den, c * shrink])


def jump_probability(state, params, dt):
    """(Gamma / 2h) [(1 + z0)^2 + b^2 / 2] dt."""
    b2, _, z0, _ = state
    return (params.gamma_big / (2 * params.h)) \
        * ((1 + z0) ** 2 + b2 / 2.0) * dt


def stationary_point(params):
    """Closed-form fixed point of the no-jump flow."""
    h, j, gam, om = params.h, params.j_hop, params.gamma_big, params.omega
    alpha = math.sqrt(-0.5 + 0.5 * math.sqrt(4 * gam ** 2 / (j ** 2 * om ** 4) + 1))
    b2 = 4 * h * j * om * alpha / gam
    phi = j * om ** 2 * alpha ** 2 / gam
    z0 = -1 + 1 / (2 * alpha ** 2 + 1)
    c = 4 * gam / (j * om ** 2 * (2 * alpha ** 2 + 1))
    return np.array([b2, phi, z0, c])


def stationary_point_numeric(params, guess=None):
    """Root of the flow field, refined from the closed form (or a guess)."""
    x0 = stationary_point(params) if guess is None else np.asarray(guess)
    # start slightly off so the solve is non-trivial
    sol = root(lambda s: packet_rhs(s, params), x0 * 1.05)
    scale = max(params.gamma_big / params.h, params.j_hop / params.h)
    if np.abs(packet_rhs(sol.x, params)).max() > 1e-10 * scale:
        raise RuntimeError(f"no stationary point found: {sol.message}")
    # polish with one Newton step through numeric Jacobian
    eps = 1e-8
    jac = np.empty((4, 4))
    fx = packet_rhs(sol.x, params)
    for k in range(4):
        dx = np.zeros(4)
        dx[k] = eps * max(abs(sol.x[k]), 1e-6)
        jac[:, k] = (packet_rhs(sol.x + dx, params)
                     - packet_rhs(sol.x - dx, params)) / (2 * dx[k])
    return sol.x - np.linalg.solve(jac, fx)


def riccati_closed_form(params, p0, q0, times):
    """No-jump evolution of p = (1 - i phi)/b^2 and q = (z0 + i c/2)/b^2."""
    h, j, gam, om = params.h, params.j_hop, params.gamma_big, params.omega
    zeta = np.sqrt(1 - 2j * gam / (j * om ** 2))
    if zeta.imag > 0:
        zeta = -zeta
    t = np.asarray(times, dtype=float)
    cplus = zeta * om + 4 * h * p0
    cminus = zeta * om - 4 * h * p0
    grow = np.exp(2j * zeta * om * j * t)
    p = (zeta * om / (4 * h)) * (cplus * grow - cminus) / (cplus * grow + cminus)
    # integrating factor solution for q
    half = np.exp(1j * zeta * om * j * t)
    i_fac = cplus * half + cminus / half
    a_term = (1j * (gam / j) * (cplus * half - cminus / half)
              + 4 * h * zeta ** 2 * om ** 2 * q0 - 8j * h * (gam / j) * p0)
    q = a_term / (2 * h * zeta * om * i_fac)
    return p, q


def packet_to_pq(state):
    b2, phi, z0, c = state
    return (1 - 1j * phi) / b2, (z0 + 0.5j * c) / b2


def pq_to_packet(p, q):
    b2 = 1.0 / np.real(p)
    return np.array([b2, -np.imag(p) * b2, np.real(q) * b2,
                     2 * np.imag(q) * b2])


def effective_double_well(params, t_final, dt, seed, record_every=1,
                          with_jumps=True, initial=None, rng=None):
    """Trajectory of the packet parameters with stochastic detections."""
    rng = rng or stream(seed)
    state = initial_packet(params) if initial is None else np.array(initial, dtype=float)
    n_steps = int(round(t_final / dt))
    times, traj, jumps = [0.0], [state.copy()], []
    t = 0.0
    for step in range(n_steps):
        if with_jumps and rng.uniform() < jump_probability(state, params, dt):
            state = jump_map(state)
            jumps.append(t + dt)
        else:
            k1 = packet_rhs(state, params)
            k2 = packet_rhs(state + 0.5 * dt * k1, params)
            k3 = packet_rhs(state + 0.5 * dt * k2, params)
            k4 = packet_rhs(state + dt * k3, params)
            state = state + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
        if (step + 1) % record_every == 0:
            times.append(t)
            traj.append(state.copy())
    traj = np.array(traj)
    return {
        "t": np.array(times),
        "b2": traj[:, 0], "phi": traj[:, 1],
        "z0": traj[:, 2], "c": traj[:, 3],
        "jumps": np.array(jumps),
    }


def growth_exponent_difference(params, b2=None):
    """Jump-driven growth rate minus the no-jump decay rate of z0.

    Positive values mean detections win and the imbalance grows.
    """
    b2 = 2 * params.h if b2 is None else b2
    grow = b2 * params.gamma_big / (2 * params.h)
    decay = params.gamma_big / params.omega
    return grow - decay


# ----------------------------------------------------------------------
# Gaussian closure of the collective stochastic equations
# ----------------------------------------------------------------------

@dataclass
class GaussianClosureParams:
    n_atoms: int
    gamma_m: float           # coefficient of N_odd^2 in c'c
    j_hop: float = 1.0


def gaussian_closure_rhs(state, params):
    """Deterministic part of (N_odd, Delta, var_N, var_D, cov_DN)."""
    n_o, delta, var_n, var_d, cov = state
    j, gam, n_tot = params.j_hop, params.gamma_m, params.n_atoms
    return np.array([
        -(j * delta + 2 * gam * n_o * var_n),
        -2 * (j * (n_tot - 2 * n_o) + gam * n_o * cov),
        -2 * (j * cov + gam * var_n ** 2),
        -2 * (4 * j * cov + gam * cov ** 2),
        j * (4 * var_n - var_d) - 2 * gam * var_n * cov,
    ])


def gaussian_closure_jump(state):
    n_o, delta, var_n, var_d, cov = state
    return np.array([
        n_o + 2 * var_n / n_o,
        delta + 2 * cov / n_o,
        var_n - 2 * var_n ** 2 / n_o ** 2,
        var_d - 2 * cov ** 2 / n_o ** 2,
        cov + 2 * cov * var_n / n_o ** 2,
    ])


def gaussian_closure_initial(params):
    """Superfluid start at half illumination: N/2 atoms, variance N/4.

    The current variance of the balanced delocalized state is N (the
    packet-variable mapping gives var_Delta = 4 var_N at phi = c = 0).
    """
    n = params.n_atoms
    return np.array([n / 2.0, 0.0, n / 4.0, float(n), 0.0])


def gaussian_closure(params, t_final, dt, seed, record_every=1,
                     with_jumps=True, initial=None, rng=None):
    """Trajectory of the closed moment hierarchy; jump prob gamma <N>^2 dt."""
    rng = rng or stream(seed)
    state = gaussian_closure_initial(params) if initial is None \
        else np.array(initial, dtype=float)
    n_steps = int(round(t_final / dt))
    times, traj, jumps = [0.0], [state.copy()], []
    for step in range(n_steps):
        p_jump = params.gamma_m * state[0] ** 2 * dt
        if with_jumps and rng.uniform() < p_jump:
            state = gaussian_closure_jump(state)
            jumps.append((step + 1) * dt)
        else:
            k1 = gaussian_closure_rhs(state, params)
            k2 = gaussian_closure_rhs(state + 0.5 * dt * k1, params)
            k3 = gaussian_closure_rhs(state + 0.5 * dt * k2, params)
            k4 = gaussian_closure_rhs(state + dt * k3, params)
            state = state + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (step + 1) % record_every == 0:
            times.append((step + 1) * dt)
            traj.append(state.copy())
    traj = np.array(traj)
    return {
        "t": np.array(times),
        "n_odd": traj[:, 0], "delta": traj[:, 1],
        "var_n": traj[:, 2], "var_delta": traj[:, 3], "cov": traj[:, 4],
        "jumps": np.array(jumps),
    }


def closure_state_from_packet(packet_state, params_dw):
    """Map (b^2, phi, z0, c) to closure variables (derived constants).

    N_odd = N (1 + z0) / 2, var_N = N^2 b^2 / 8, Delta = -(2 z0 phi + c)/b^2
    (scaled by N/2 relative to the normalized current), cov = -N phi / 2.
    """
    n = params_dw.n_atoms
    b2, phi, z0, c = packet_state
    return np.array([
        n * (1 + z0) / 2.0,
        -n / 2.0 * (2 * z0 * phi + c) / b2 * (2 * params_dw.h / b2) ** 0,
        n ** 2 * b2 / 8.0,
        float("nan"),
        -n * phi / 2.0,
    ])

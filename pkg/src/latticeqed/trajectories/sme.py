"""Photocount stochastic master equation with finite detector efficiency.

d rho = dN G[sqrt(eta) c] rho - dt H[i H0 + (eta/2) c'c] rho
        + dt (1 - eta) D[c] rho

At eta = 1 a pure initial state stays pure and reproduces jump-trajectory
statistics; at eta = 0 the equation is the deterministic Lindblad flow.
"""

from dataclasses import dataclass

import numpy as np

from ..core.operators import SparseComplexOperator
from .rng import stream

TRACE_TOL = 1e-6


class TraceDriftError(RuntimeError):
    pass


def _dense(op):
    m = op.matrix if isinstance(op, SparseComplexOperator) else op
    return np.asarray(m.toarray() if hasattr(m, "toarray") else m,
                      dtype=complex)


def _drift(rho, h, c, cdc, eta, c_diag=None):
    """Deterministic part between detections (trace preserving)."""
    comm = -1j * (h @ rho - rho @ h)
    if c_diag is not None:
        dd = (np.abs(c_diag) ** 2).real
        sandwich = c_diag[:, None] * rho * np.conj(c_diag)[None, :]
        anticomm = dd[:, None] * rho + rho * dd[None, :]
    else:
        sandwich = c @ rho @ c.conj().T
        anticomm = cdc @ rho + rho @ cdc
    feed = eta * float(np.real(np.trace(cdc @ rho))) * rho
    return (comm - 0.5 * eta * anticomm + feed
            + (1 - eta) * (sandwich - 0.5 * anticomm))


def sme_run(h0, c, eta, rho0, dt, t_final, seed, observables=None,
            record_every=1, rng=None):
    """One conditioned density-matrix trajectory.

    Returns dict with 't', per-observable traces, 'n_detected', 'jumps'.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("efficiency must lie in [0, 1]")
    rng = rng or stream(seed)
    h = _dense(h0)
    cm = _dense(c)
    cdc = cm.conj().T @ cm
    c_diag = None
    if np.allclose(cm, np.diag(np.diagonal(cm)), atol=1e-14):
        c_diag = np.diagonal(cm).copy()
    rho = _dense(rho0)
    rho = rho / np.trace(rho).real

    obs = {k: _dense(v) for k, v in (observables or {}).items()}
    n_steps = int(round(t_final / dt))
    times = [0.0]
    recs = {k: [float(np.real(np.trace(m @ rho)))] for k, m in obs.items()}
    var_recs = {k: [_variance(m, rho)] for k, m in obs.items()}
    jumps = []

    for step in range(n_steps):
        p_jump = eta * float(np.real(np.trace(cdc @ rho))) * dt
        if rng.uniform() < p_jump:
            new = cm @ rho @ cm.conj().T
            rho = new / np.trace(new).real
            jumps.append((step + 1) * dt)
        else:
            k1 = _drift(rho, h, cm, cdc, eta, c_diag)
            k2 = _drift(rho + 0.5 * dt * k1, h, cm, cdc, eta, c_diag)
            k3 = _drift(rho + 0.5 * dt * k2, h, cm, cdc, eta, c_diag)
            k4 = _drift(rho + dt * k3, h, cm, cdc, eta, c_diag)
            rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            drift = abs(np.trace(rho).real - 1.0)
            if drift > TRACE_TOL:
                raise TraceDriftError(
                    f"trace drift {drift:.2e} exceeds {TRACE_TOL}; reduce dt")
            rho = rho / np.trace(rho).real
        if (step + 1) % record_every == 0:
            times.append((step + 1) * dt)
            for k, m in obs.items():
                recs[k].append(float(np.real(np.trace(m @ rho))))
                var_recs[k].append(_variance(m, rho))

    out = {"t": np.array(times), "jumps": np.array(jumps),
           "n_detected": len(jumps), "_rho": rho}
    for k in obs:
        out[k] = np.array(recs[k])
        out["var_" + k] = np.array(var_recs[k])
    return out


def _variance(m, rho):
    mean = np.real(np.trace(m @ rho))
    sq = np.real(np.trace(m @ m @ rho))
    return float(sq - mean ** 2)


def visibility_threshold(j_hop, gamma, n_atoms):
    """Minimum efficiency eta ~ J / (gamma N^2) resolving the oscillations."""
    return j_hop / (gamma * n_atoms ** 2)

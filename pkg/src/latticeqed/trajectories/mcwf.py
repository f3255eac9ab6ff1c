"""Quantum-jump wave-function evolution with structured jump operators.

Between detections the state follows H_eff = H0 - (i/2) sum_k c_k' c_k
with a fixed-step 4th-order integrator and per-step renormalization; a
detection fires when the total jump probability in a step exceeds a fresh
uniform draw, the channel picked in proportion to its rate.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..core.operators import SparseComplexOperator
from .rng import stream

NORM_FLOOR = 1e-12


class StepSizeError(RuntimeError):
    pass


@dataclass
class JumpChannel:
    """A collapse operator, optionally followed by a feedback unitary."""

    operator: object                  # SparseComplexOperator or matrix
    feedback: object = None           # unitary applied after each jump
    label: str = ""

    def matrix(self):
        op = self.operator
        return op.matrix if isinstance(op, SparseComplexOperator) else op


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    observables: dict
    jump_times: np.ndarray
    jump_channels: np.ndarray
    seed: int
    dt: float
    final_state: np.ndarray = field(repr=False, default=None)

    @property
    def jump_count(self):
        return len(self.jump_times)


def _as_matrix(op):
    return op.matrix if isinstance(op, SparseComplexOperator) else op


def effective_hamiltonian(h0, channels):
    """H0 - (i/2) sum c'c as a sparse matrix."""
    h = _as_matrix(h0).astype(complex)
    total = sp.csr_matrix(h.shape, dtype=complex)
    for ch in channels:
        c = ch.matrix()
        total = total + c.getH() @ c
    return (h - 0.5j * total).tocsr()


def _rk4(mat, psi, dt):
    k1 = mat @ psi
    k2 = mat @ (psi + 0.5 * dt * k1)
    k3 = mat @ (psi + 0.5 * dt * k2)
    k4 = mat @ (psi + dt * k3)
    return psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def default_timestep(h0, channels, scale=1e-3):
    """dt = scale / (operator-norm bound of the non-Hermitian generator)."""
    heff = effective_hamiltonian(h0, channels)
    bound = abs(heff).sum(axis=1).max()
    return scale / max(float(np.real(bound)), 1e-12)


def mcwf_run(h0, channels, psi0, dt, t_final, seed,
             observables=None, record_every=1, rng=None,
             max_expected_jump_prob=0.25):
    """One conditioned trajectory.

    ``observables`` maps names to operators (or callables of psi). Records
    are taken every ``record_every`` steps. Returns a TrajectoryRecord.
    """
    rng = rng or stream(seed)
    heff = effective_hamiltonian(h0, channels)
    gen = -1j * heff
    cs = [ch.matrix() for ch in channels]
    feedbacks = [(_as_matrix(ch.feedback) if ch.feedback is not None else None)
                 for ch in channels]

    psi = np.asarray(psi0, dtype=complex).copy()
    psi /= np.linalg.norm(psi)
    n_steps = int(round(t_final / dt))
    observables = observables or {}

    times, recs = [], {k: [] for k in observables}
    jump_times, jump_channels = [], []

    def record(t):
        times.append(t)
        for name, op in observables.items():
            if callable(op) and not isinstance(op, SparseComplexOperator):
                recs[name].append(op(psi))
            else:
                m = _as_matrix(op)
                recs[name].append(float(np.real(np.vdot(psi, m @ psi))))

    record(0.0)
    t = 0.0
    for step in range(n_steps):
        rates = np.array([np.real(np.vdot(c @ psi, c @ psi)) for c in cs])
        p_total = float(rates.sum() * dt)
        if p_total > max_expected_jump_prob:
            raise StepSizeError(
                f"jump probability {p_total:.3f} per step; decrease dt")
        if rates.size and rng.uniform() < p_total:
            # a single channel must not consume an extra draw (keeps the
            # draw sequence aligned with the density-matrix unravelling)
            k = 0 if len(cs) == 1 else rng.choice(len(cs), p=rates / rates.sum())
            psi = cs[k] @ psi
            if feedbacks[k] is not None:
                psi = feedbacks[k] @ psi
            nrm = np.linalg.norm(psi)
            if nrm < NORM_FLOOR:
                raise StepSizeError("state collapsed below the norm floor")
            psi /= nrm
            jump_times.append(t + dt)
            jump_channels.append(k)
        else:
            psi = _rk4(gen, psi, dt)
            nrm = np.linalg.norm(psi)
            if nrm < NORM_FLOOR:
                raise StepSizeError("norm underflow; decrease dt")
            psi /= nrm
        t += dt
        if (step + 1) % record_every == 0:
            record(t)

    return TrajectoryRecord(
        times=np.array(times),
        observables={k: np.array(v) for k, v in recs.items()},
        jump_times=np.array(jump_times),
        jump_channels=np.array(jump_channels, dtype=int),
        seed=seed, dt=dt, final_state=psi)


def mcwf_ensemble(h0, channels, psi0, dt, t_final, seed, n_traj,
                  observables=None, record_every=1):
    """Batched ensemble: one vectorized integrator, per-trajectory draws.

    Observables must be operators (not callables); returns times plus
    per-observable arrays of shape (n_traj, n_records).
    """
    heff = effective_hamiltonian(h0, channels)
    gen = (-1j * heff).tocsr()
    cs = [ch.matrix().tocsr() for ch in channels]
    feedbacks = [(_as_matrix(ch.feedback) if ch.feedback is not None else None)
                 for ch in channels]
    obs = {k: _as_matrix(v).tocsr() for k, v in (observables or {}).items()}

    rngs = [stream(seed, i) for i in range(n_traj)]
    dim = _as_matrix(h0).shape[0]
    psis = np.tile(np.asarray(psi0, dtype=complex)[:, None], (1, n_traj))
    psis /= np.linalg.norm(psis, axis=0, keepdims=True)

    n_steps = int(round(t_final / dt))
    times = [0.0]
    recs = {k: [np.real(np.einsum("it,it->t", np.conj(psis), m @ psis))]
            for k, m in obs.items()}

    for step in range(n_steps):
        cpsis = [c @ psis for c in cs]
        rates = np.stack([np.real(np.einsum("it,it->t", np.conj(cp), cp))
                          for cp in cpsis])          # (n_ch, n_traj)
        p_tot = rates.sum(axis=0) * dt
        draws = np.array([r.uniform() for r in rngs])
        jumped = draws < p_tot

        new = _rk4(gen, psis, dt)
        if jumped.any():
            for t_idx in np.where(jumped)[0]:
                r = rates[:, t_idx]
                k = 0 if len(cs) == 1 else rngs[t_idx].choice(len(cs), p=r / r.sum())
                v = cpsis[k][:, t_idx]
                if feedbacks[k] is not None:
                    v = feedbacks[k] @ v
                new[:, t_idx] = v
        norms = np.linalg.norm(new, axis=0)
        if (norms < NORM_FLOOR).any():
            raise StepSizeError("norm underflow in ensemble; decrease dt")
        psis = new / norms
        if (step + 1) % record_every == 0:
            times.append((step + 1) * dt)
            for k, m in obs.items():
                recs[k].append(np.real(
                    np.einsum("it,it->t", np.conj(psis), m @ psis)))

    return (np.array(times),
            {k: np.array(v).T for k, v in recs.items()},
            psis)

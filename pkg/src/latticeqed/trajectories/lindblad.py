"""Dense Lindblad master-equation solver (ensemble-average oracle)."""

import numpy as np
import scipy.linalg as la

from ..core.operators import SparseComplexOperator


def _mat(op):
    m = op.matrix if isinstance(op, SparseComplexOperator) else op
    return np.asarray(m.toarray() if hasattr(m, "toarray") else m, dtype=complex)


def liouvillian(h0, collapse_ops):
    """Superoperator L with d vec(rho)/dt = L vec(rho) (column stacking)."""
    h = _mat(h0)
    d = h.shape[0]
    eye = np.eye(d)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c in collapse_ops:
        cm = _mat(c)
        cdc = cm.conj().T @ cm
        lv += (np.kron(cm.conj(), cm)
               - 0.5 * np.kron(eye, cdc)
               - 0.5 * np.kron(cdc.T, eye))
    return lv


def lindblad_evolve(h0, collapse_ops, rho0, times, observables=None):
    """Exact propagation rho(t) = expm(L t) rho0 on a time grid.

    Returns dict of observable traces (plus '_rho' final state).
    """
    lv = liouvillian(h0, collapse_ops)
    d = int(round(np.sqrt(lv.shape[0])))
    rho = _mat(rho0).reshape(-1, order="F")
    times = np.asarray(times, dtype=float)
    obs = {k: _mat(v) for k, v in (observables or {}).items()}
    out = {k: np.empty(len(times)) for k in obs}

    prev_t = 0.0
    current = rho.copy()
    for i, t in enumerate(times):
        if t != prev_t:
            current = la.expm(lv * (t - prev_t)) @ current
            prev_t = t
        rmat = current.reshape(d, d, order="F")
        for k, m in obs.items():
            out[k][i] = float(np.real(np.trace(m @ rmat)))
    out["_rho"] = current.reshape(d, d, order="F")
    return out


def pure_density(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())

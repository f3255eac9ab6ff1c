"""Strong-measurement (near-projective) non-Hermitian dynamics.

When the detection rate far exceeds the tunneling rate, a trajectory with
a steady count rate stays in one measurement eigenspace and is described by
the deterministic generator H0 + i(c0* c - |c0|^2/2 - c'c/2) without jumps;
second-order transitions through other eigenspaces survive at rate ~ J^2
over the measurement scale.
"""

import numpy as np
import scipy.sparse as sp

from ..core.lattice import classify_values
from ..core.operators import SparseComplexOperator


def _mat(op):
    return op.matrix if isinstance(op, SparseComplexOperator) else op


def zeno_effective(h0, c, c0):
    """Full non-Hermitian generator for the eigenvalue-c0 subspace."""
    h = _mat(h0).astype(complex)
    cm = _mat(c)
    return (h + 1j * (np.conj(c0) * cm
                      - 0.5 * abs(c0) ** 2 * sp.identity(h.shape[0], dtype=complex, format="csr")
                      - 0.5 * cm.getH() @ cm)).tocsr()


def measurement_subspaces(c, rtol=1e-9):
    """Projector masks for the eigenvalue classes of a diagonal jump operator."""
    cm = _mat(c)
    diag = np.asarray(cm.diagonal())
    off = cm - sp.diags(diag)
    if off.nnz and abs(off).max() > 1e-12:
        raise ValueError("subspace projectors need a diagonal jump operator")
    count, assignment = classify_values(diag, rtol)
    values = [diag[assignment == k][0] for k in range(count)]
    return values, assignment


def projected_second_order(h0, c, c0, rtol=1e-9):
    """P0 [H0 - i H0 Q w^{-1} Q H0] P0 on the c0 eigenspace.

    Intermediate eigenspaces decay at w = |c_q - c0|^2 / 2 (the
    non-Hermitian rate of the full generator), which sets the
    second-order transition scale ~ J^2 / w.
    Returns (h_projected (dense, on the subspace), subspace index list).
    """
    h = _mat(h0).toarray() if sp.issparse(_mat(h0)) else np.asarray(_mat(h0))
    values, assignment = measurement_subspaces(c, rtol)
    diag = np.asarray(_mat(c).diagonal())
    scale = max(np.abs(diag).max(), 1.0)
    in_mask = np.abs(diag - c0) <= rtol * scale
    inside = np.where(in_mask)[0]
    outside = np.where(~in_mask)[0]
    h_pp = h[np.ix_(inside, inside)]
    h_pq = h[np.ix_(inside, outside)]
    weights = np.abs(diag[outside] - c0) ** 2 / 2.0
    second = h_pq @ np.diag(1.0 / weights) @ h_pq.conj().T
    return h_pp - 1j * second, inside


def evolve_nonhermitian(generator, psi0, dt, t_final, observables=None,
                        record_every=1):
    """Renormalized no-jump evolution under a (sparse) non-Herm generator."""
    gen = (-1j * _mat(generator)).tocsr() if sp.issparse(_mat(generator)) \
        else -1j * np.asarray(_mat(generator))
    psi = np.asarray(psi0, dtype=complex).copy()
    psi /= np.linalg.norm(psi)
    n_steps = int(round(t_final / dt))
    observables = observables or {}
    times = [0.0]
    recs = {k: [] for k in observables}

    def record():
        for name, op in observables.items():
            if callable(op) and not isinstance(op, SparseComplexOperator):
                recs[name].append(op(psi))
            else:
                m = _mat(op)
                recs[name].append(float(np.real(np.vdot(psi, m @ psi))))

    record()
    for step in range(n_steps):
        k1 = gen @ psi
        k2 = gen @ (psi + 0.5 * dt * k1)
        k3 = gen @ (psi + 0.5 * dt * k2)
        k4 = gen @ (psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        psi /= np.linalg.norm(psi)
        if (step + 1) % record_every == 0:
            times.append((step + 1) * dt)
            record()
    return np.array(times), {k: np.array(v) for k, v in recs.items()}, psi


def three_site_populations_analytic(z_overlaps, j_hop, gamma, times):
    """Population amplitudes of the middle-site-frozen triple.

    Components (z1 + sqrt2 z2 e^{-6J^2 t/g} + z3 e^{-12 J^2 t/g},
    -sqrt2 (z1 - z3 e^{-12 J^2 t/g}), mirror) on the frozen subspace,
    renormalized.
    """
    z1, z2, z3 = z_overlaps
    t = np.asarray(times, dtype=float)
    e6 = np.exp(-6 * j_hop ** 2 * t / gamma)
    e12 = np.exp(-12 * j_hop ** 2 * t / gamma)
    comp = np.stack([
        z1 + math_sqrt2 * z2 * e6 + z3 * e12,
        -math_sqrt2 * (z1 - z3 * e12),
        z1 - math_sqrt2 * z2 * e6 + z3 * e12,
    ])
    norm = np.linalg.norm(comp, axis=0)
    return (np.abs(comp) ** 2 / norm ** 2).T


math_sqrt2 = np.sqrt(2.0)

ZENO_STEADY_TRIPLE = np.array([1.0, -math_sqrt2, 1.0]) / 2.0


def pair_correlation_prediction(j_hop, gamma, times):
    """Edge-site covariance growth [1 - sech^2(4 J^2 t / gamma)] / 4."""
    t = np.asarray(times, dtype=float)
    return (1.0 - 1.0 / np.cosh(4 * j_hop ** 2 * t / gamma) ** 2) / 4.0

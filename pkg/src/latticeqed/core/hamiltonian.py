"""Hubbard-type lattice Hamiltonians and ground-state solvers."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fock import BosonFockBasis
from .operators import (SparseComplexOperator, diagonal_op, hop_op,
                        zero_op)

DENSE_RESIDUAL_TOL = 1e-10


@dataclass
class HamiltonianSpec:
    """Parameters of the lattice Hamiltonian (energies in units of hbar)."""

    tunneling: float = 1.0       # nearest-neighbour amplitude t0
    interaction: float = 0.0     # on-site U
    chemical_potential: float = 0.0
    disorder: np.ndarray = None  # per-site offsets V_i, optional
    statistics: str = "boson"
    periodic: bool = False

    def __post_init__(self):
        for v in (self.tunneling, self.interaction, self.chemical_potential):
            if not np.isfinite(v):
                raise ValueError("Hamiltonian parameters must be finite")


def _bonds(n_sites, periodic):
    bonds = [(j, j + 1) for j in range(n_sites - 1)]
    if periodic and n_sites > 2:
        bonds.append((n_sites - 1, 0))
    return bonds


def build_hamiltonian(spec, basis):
    """H = -t0 sum_<ij> hop + interactions - mu N + disorder.

    Bosons: (U/2) sum n(n-1); fermions: U sum n_up n_down (attractive U < 0).
    """
    if spec.statistics != basis.statistics:
        raise ValueError("basis statistics does not match the spec")
    m = basis.n_sites
    h = zero_op(basis)

    if isinstance(basis, BosonFockBasis):
        for a, b in _bonds(m, spec.periodic):
            hop = hop_op(basis, a, b)
            h = h - spec.tunneling * (hop + hop.dag())
        occ = basis.occupations().astype(float)
        diag = 0.5 * spec.interaction * np.sum(occ * (occ - 1), axis=1)
        diag -= spec.chemical_potential * occ.sum(axis=1)
        if spec.disorder is not None:
            diag += occ @ np.asarray(spec.disorder, dtype=float)
        h = h + diagonal_op(basis, diag)
    else:
        for spin in ("up", "down"):
            for a, b in _bonds(m, spec.periodic):
                hop = hop_op(basis, a, b, spin)
                h = h - spec.tunneling * (hop + hop.dag())
        up = basis.occupations("up").astype(float)
        dn = basis.occupations("down").astype(float)
        diag = spec.interaction * np.sum(up * dn, axis=1)
        diag -= spec.chemical_potential * (up + dn).sum(axis=1)
        if spec.disorder is not None:
            diag += (up + dn) @ np.asarray(spec.disorder, dtype=float)
        h = h + diagonal_op(basis, diag)
    return h


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def ground_state(h, method="auto", tol=1e-10, max_iter=2000):
    """Lowest eigenpair of a Hermitian operator.

    Returns (energy, state). ``method`` in {'auto','dense','lanczos',
    'imaginary-time'}; 'auto' goes dense below dimension 600.
    """
    mat = h.matrix if isinstance(h, SparseComplexOperator) else h
    dim = mat.shape[0]
    if method == "auto":
        method = "dense" if dim <= 600 else "lanczos"

    if method == "dense":
        w, v = np.linalg.eigh(mat.toarray())
        energy, state = w[0], v[:, 0]
    elif method == "lanczos":
        w, v = spla.eigsh(mat, k=1, which="SA", tol=tol)
        energy, state = w[0], v[:, 0]
    elif method == "imaginary-time":
        energy, state = _imaginary_time(mat, tol, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")

    state = state / np.linalg.norm(state)
    residual = np.linalg.norm(mat @ state - energy * state)
    limit = DENSE_RESIDUAL_TOL if method == "dense" else max(tol, 1e-8)
    # eigsh residuals scale with the spectral width
    scale = max(1.0, abs(energy))
    if residual > limit * scale * 100 and method != "dense":
        raise ConvergenceError(
            f"ground state residual {residual:.2e} above tolerance", residual)
    return float(energy), state


def _imaginary_time(mat, tol, max_iter):
    """Shifted power iteration on (c - H), the discrete imaginary-time map."""
    rng = np.random.default_rng(7)
    psi = rng.normal(size=mat.shape[0]) + 0j
    psi /= np.linalg.norm(psi)
    bound = float(np.real(abs(mat).sum(axis=1).max()))
    target = max(tol, 1e-10)
    energy = float(np.real(np.vdot(psi, mat @ psi)))
    for _ in range(max_iter):
        psi = bound * psi - (mat @ psi)
        psi /= np.linalg.norm(psi)
        energy = float(np.real(np.vdot(psi, mat @ psi)))
        residual = np.linalg.norm(mat @ psi - energy * psi)
        if residual < target * max(1.0, abs(energy)):
            break
    else:
        raise ConvergenceError(
            f"imaginary time did not converge; residual {residual:.2e}",
            residual)
    return energy, psi

"""Sparse operator algebra on the Fock bases.

All builders return ``SparseComplexOperator`` wrapping a CSR matrix tied to
its basis. Bosonic matrix elements follow b†_i b_j |..n_i..n_j..> =
sqrt(n_j (n_i+1)) |..n_i+1..n_j-1..>; fermionic bilinears carry the
Jordan-Wigner sign of the occupied modes strictly between the two sites.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import BosonFockBasis, FermionFockBasis

HERMITIAN_TOL = 1e-12


@dataclass
class SparseComplexOperator:
    """A complex sparse matrix together with the basis it acts on."""

    basis: object
    matrix: sp.csr_matrix

    def __post_init__(self):
        d = self.basis.dim
        if self.matrix.shape != (d, d):
            raise ValueError("operator dimensions do not match basis")

    @property
    def hermitian(self):
        diff = self.matrix - self.matrix.getH()
        return diff.nnz == 0 or abs(diff).max() < HERMITIAN_TOL

    def dag(self):
        return SparseComplexOperator(self.basis, self.matrix.getH().tocsr())

    def __add__(self, other):
        return SparseComplexOperator(self.basis, (self.matrix + other.matrix).tocsr())

    def __sub__(self, other):
        return SparseComplexOperator(self.basis, (self.matrix - other.matrix).tocsr())

    def __mul__(self, scalar):
        return SparseComplexOperator(self.basis, (self.matrix * scalar).tocsr())

    __rmul__ = __mul__

    def __matmul__(self, other):
        return SparseComplexOperator(self.basis, (self.matrix @ other.matrix).tocsr())

    def expect(self, psi):
        return complex(np.vdot(psi, self.matrix @ psi))

    def toarray(self):
        return self.matrix.toarray()


def identity_op(basis):
    return SparseComplexOperator(basis, sp.identity(basis.dim, dtype=complex, format="csr"))


def zero_op(basis):
    return SparseComplexOperator(basis, sp.csr_matrix((basis.dim, basis.dim), dtype=complex))


def number_op(basis, site, spin=None):
    """n_i (bosons) or n_{i,spin} (fermions); spin=None sums both species."""
    if isinstance(basis, BosonFockBasis):
        diag = basis.occupations()[:, site].astype(complex)
    else:
        if spin is None:
            diag = (basis.occupations("up")[:, site]
                    + basis.occupations("down")[:, site]).astype(complex)
        else:
            diag = basis.occupations(spin)[:, site].astype(complex)
    return SparseComplexOperator(basis, sp.diags(diag, format="csr", dtype=complex))


def diagonal_op(basis, diag):
    return SparseComplexOperator(basis, sp.diags(np.asarray(diag, dtype=complex), format="csr"))


def hop_op(basis, i, j, spin=None):
    """b†_i b_j (bosons) or f†_{i,spin} f_{j,spin} (fermions)."""
    if isinstance(basis, BosonFockBasis):
        return _boson_hop(basis, i, j)
    if spin is None:
        raise ValueError("fermionic hop needs an explicit spin")
    return _fermion_hop(basis, i, j, spin)


def _boson_hop(basis, i, j):
    if i == j:
        return number_op(basis, i)
    rows, cols, vals = [], [], []
    for col, st in enumerate(basis.states):
        nj = st[j]
        if nj == 0:
            continue
        new = list(st)
        new[j] -= 1
        new[i] += 1
        row = basis.index[tuple(new)]
        rows.append(row)
        cols.append(col)
        vals.append(np.sqrt(nj * (st[i] + 1)))
    m = sp.csr_matrix((vals, (rows, cols)),
                      shape=(basis.dim, basis.dim), dtype=complex)
    return SparseComplexOperator(basis, m)


def _jw_sign(mask, i, j):
    """Parity of occupied modes strictly between sites i and j."""
    lo, hi = (i, j) if i < j else (j, i)
    between = mask & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1.0 if bin(between).count("1") % 2 else 1.0


def _fermion_hop(basis, i, j, spin):
    sel = 0 if spin == "up" else 1
    if i == j:
        return number_op(basis, i, spin)
    rows, cols, vals = [], [], []
    for col, st in enumerate(basis.states):
        mask = st[sel]
        if not (mask >> j) & 1 or (mask >> i) & 1:
            continue
        new_mask = (mask & ~(1 << j)) | (1 << i)
        new = (new_mask, st[1]) if sel == 0 else (st[0], new_mask)
        rows.append(basis.index[new])
        cols.append(col)
        vals.append(_jw_sign(mask, i, j))
    m = sp.csr_matrix((vals, (rows, cols)),
                      shape=(basis.dim, basis.dim), dtype=complex)
    return SparseComplexOperator(basis, m)


def pair_create_op(basis, i, spin_pair=("up", "down")):
    """Fermionic f†_{i,s1} f†_{i,s2}; zero (with a warning flag) if s1 == s2."""
    if not isinstance(basis, FermionFockBasis):
        raise ValueError("pair_create_op is fermionic")
    if spin_pair[0] == spin_pair[1]:
        # Pauli exclusion: creating twice in the same mode annihilates.
        op = zero_op(basis)
        op.pauli_blocked = True
        return op
    raise NotImplementedError("cross-sector pair creation is not needed here")


def weighted_number_sum(basis, weights, spin=None):
    """Sum_j w_j n_j as a diagonal operator (the density-coupling pattern)."""
    weights = np.asarray(weights, dtype=complex)
    if isinstance(basis, BosonFockBasis):
        occ = basis.occupations()
        diag = occ.astype(complex) @ weights
    else:
        if spin == "density":
            occ = basis.occupations("up") + basis.occupations("down")
        elif spin == "magnetization":
            occ = basis.occupations("up") - basis.occupations("down")
        elif spin in ("up", "down"):
            occ = basis.occupations(spin)
        else:
            raise ValueError("fermionic weighted sum needs spin in "
                             "{'up','down','density','magnetization'}")
        diag = occ.astype(complex) @ weights
    return SparseComplexOperator(basis, sp.diags(diag, format="csr"))


def weighted_bond_sum(basis, bond_weights, periodic=False):
    """Sum_j w_j (b†_j b_{j+1} + b†_{j+1} b_j) over nearest-neighbour bonds."""
    m = basis.n_sites
    bonds = [(j, j + 1) for j in range(m - 1)]
    if periodic and m > 2:
        bonds.append((m - 1, 0))
    op = zero_op(basis)
    for w, (a, b) in zip(bond_weights, bonds):
        if w == 0:
            continue
        hop = _boson_hop(basis, a, b)
        op = op + w * (hop + hop.dag())
    return op


def total_number_op(basis, sites=None):
    """N̂ restricted to ``sites`` (all sites when None)."""
    m = basis.n_sites
    sites = range(m) if sites is None else sites
    w = np.zeros(m)
    for s in sites:
        w[s] = 1.0
    if isinstance(basis, BosonFockBasis):
        return weighted_number_sum(basis, w)
    return weighted_number_sum(basis, w, spin="density")

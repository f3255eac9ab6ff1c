"""Fock-space bases for bosons on a lattice and spin-1/2 fermions.

State ordering is deterministic (lexicographically descending occupation
vectors) so that serialized states are portable between runs.
"""

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

DIMENSION_CAP = 5_000_000


class CapacityError(RuntimeError):
    """Basis dimension exceeds the configured cap."""


def _boson_occupations(n_atoms, n_sites):
    """All occupation vectors with fixed total, lexicographically descending."""
    out = []

    def rec(prefix, remaining, sites_left):
        if sites_left == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining, -1, -1):
            rec(prefix + (k,), remaining - k, sites_left - 1)

    rec((), n_atoms, n_sites)
    return out


@dataclass
class BosonFockBasis:
    """Number-conserving bosonic Fock basis on ``n_sites`` sites."""

    n_atoms: int
    n_sites: int
    states: list = field(repr=False, default=None)
    index: dict = field(repr=False, default=None)

    def __post_init__(self):
        if self.n_atoms < 0 or self.n_sites < 1:
            raise ValueError("need n_atoms >= 0 and n_sites >= 1")
        dim = comb(self.n_atoms + self.n_sites - 1, self.n_atoms)
        if dim > DIMENSION_CAP:
            raise CapacityError(
                f"boson basis dimension {dim} exceeds cap {DIMENSION_CAP}")
        self.states = _boson_occupations(self.n_atoms, self.n_sites)
        self.index = {s: i for i, s in enumerate(self.states)}

    @property
    def dim(self):
        return len(self.states)

    @property
    def statistics(self):
        return "boson"

    def occupations(self):
        """(dim, n_sites) integer array of occupation vectors."""
        return np.array(self.states, dtype=np.int64)


@dataclass
class FermionFockBasis:
    """Spin-1/2 fermions: occupations in {0,1} per (site, spin).

    Mode ordering is site-major with the full spin-up block before the
    spin-down block; the Jordan-Wigner sign convention follows this order.
    """

    n_up: int
    n_down: int
    n_sites: int
    states: list = field(repr=False, default=None)
    index: dict = field(repr=False, default=None)

    def __post_init__(self):
        m = self.n_sites
        if not (0 <= self.n_up <= m and 0 <= self.n_down <= m):
            raise ValueError("spin populations must fit on the lattice")
        dim = comb(m, self.n_up) * comb(m, self.n_down)
        if dim > DIMENSION_CAP:
            raise CapacityError(
                f"fermion basis dimension {dim} exceeds cap {DIMENSION_CAP}")
        ups = [sum(1 << i for i in c) for c in combinations(range(m), self.n_up)]
        downs = [sum(1 << i for i in c) for c in combinations(range(m), self.n_down)]
        # descending masks reproduce descending occupation vectors
        ups.sort(reverse=True)
        downs.sort(reverse=True)
        self.states = [(u, d) for u in ups for d in downs]
        self.index = {s: i for i, s in enumerate(self.states)}

    @property
    def dim(self):
        return len(self.states)

    @property
    def statistics(self):
        return "fermion"

    def occupations(self, spin):
        """(dim, n_sites) array of occupations for one spin species."""
        sel = 0 if spin == "up" else 1
        occ = np.zeros((self.dim, self.n_sites), dtype=np.int64)
        for r, st in enumerate(self.states):
            mask = st[sel]
            for i in range(self.n_sites):
                occ[r, i] = (mask >> i) & 1
        return occ


def build_basis(n_atoms, n_sites, statistics="boson"):
    """Factory for the two basis kinds.

    ``n_atoms`` is an int for bosons or an (n_up, n_down) pair for fermions.
    """
    if statistics == "boson":
        return BosonFockBasis(int(n_atoms), int(n_sites))
    if statistics == "fermion":
        n_up, n_down = n_atoms
        return FermionFockBasis(int(n_up), int(n_down), int(n_sites))
    raise ValueError(f"unknown statistics {statistics!r}")

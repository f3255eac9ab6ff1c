"""On-site and cross-site number moments for the reference atomic states.

Moments of products of number operators over distinct sites are generated
from normal-ordered correlators: n^p = sum_k S(p,k) b'^k b^k with Stirling
numbers S of the second kind. For a uniform superfluid of N atoms on M
sites the normal-ordered correlator over any sites is the falling factorial
N(N-1)...(N-K+1)/M^K; for a product of on-site coherent states it is
(N/M)^K; for the unit-filling style insulator every moment factorizes.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np



@lru_cache(maxsize=None)
def _stirling2(p, k):
    if p == k == 0:
        return 1
    if p == 0 or k == 0 or k > p:
        return 0
    return k * _stirling2(p - 1, k) + _stirling2(p - 1, k - 1)


def _falling(n, k):
    out = 1.0
    for i in range(k):
        out *= (n - i)
    return out


@dataclass(frozen=True)
class AtomicStateMoments:
    """Mean filling plus every number moment needed by the light observables."""

    n: float
    n2: float
    nanb: float
    na2nb: float
    na3nb: float
    na2nb2: float
    na2nbnc: float
    nanbncnd: float
    n4: float
    source: str = "numeric"

    # the specific patterns used by the closed-form photon statistics
    def pattern(self, exponents):
        """Moment for site-exponent multiset, e.g. (2,1,1) -> <na^2 nb nc>."""
        key = tuple(sorted(exponents, reverse=True))
        table = {
            (1,): self.n,
            (2,): self.n2,
            (1, 1): self.nanb,
            (2, 1): self.na2nb,
            (3, 1): self.na3nb,
            (2, 2): self.na2nb2,
            (2, 1, 1): self.na2nbnc,
            (1, 1, 1, 1): self.nanbncnd,
            (4,): self.n4,
            (3,): None,   # filled below when available
        }
        if key == (3,):
            raise KeyError("single-site third moment is not tracked")
        if key not in table:
            raise KeyError(f"moment pattern {key} not tracked")
        return table[key]

    @property
    def onsite_variance(self):
        return self.n2 - self.n ** 2

    @property
    def pair_covariance(self):
        return self.nanb - self.n ** 2


def _moment_from_exponents(exponents, correlator):
    """<prod_i n_i^{p_i}> over distinct sites via Stirling expansion.

    ``correlator(ks)`` returns the normal-ordered correlator
    <prod_i b'^{k_i} b^{k_i}> for per-site operator orders ``ks``.
    """
    exps = [p for p in exponents if p > 0]

    def rec(idx, ks, coeff):
        if idx == len(exps):
            return coeff * correlator(ks)
        total = 0.0
        for k in range(1, exps[idx] + 1):
            s = _stirling2(exps[idx], k)
            if s:
                total += rec(idx + 1, ks + (k,), coeff * s)
        return total

    return rec(0, (), 1.0)


def _build(correlator, source, n_mean):
    pats = {
        "n2": (2,), "nanb": (1, 1), "na2nb": (2, 1), "na3nb": (3, 1),
        "na2nb2": (2, 2), "na2nbnc": (2, 1, 1), "nanbncnd": (1, 1, 1, 1),
        "n4": (4,),
    }
    vals = {k: _moment_from_exponents(p, correlator) for k, p in pats.items()}
    return AtomicStateMoments(n=n_mean, source=source, **vals)


def insulator_moments(filling):
    """Pinned integer filling: per-site falling factorials, no correlations."""
    if filling < 0 or abs(filling - round(filling)) > 1e-12:
        raise ValueError("insulator state needs a non-negative integer filling")
    n = float(filling)

    def corr(ks):
        out = 1.0
        for k in ks:
            out *= _falling(n, k)
        return out

    return _build(corr, "MI", n)


def superfluid_moments(n_atoms, n_sites):
    """Uniformly delocalized N atoms on M sites."""
    n_atoms, n_sites = int(n_atoms), int(n_sites)
    return _build(lambda ks: _falling(n_atoms, sum(ks)) / n_sites ** sum(ks),
                  "SF", n_atoms / n_sites)


def coherent_moments(filling):
    """Product of on-site coherent states with mean ``filling``."""
    n = float(filling)
    return _build(lambda ks: n ** sum(ks), "coherent", n)


def numeric_moments(state, basis, sites=None):
    """Moments of an explicit state vector, averaged over site tuples.

    Uses direct operator application; assumes site-exchange symmetry only in
    the sense that returned values are tuple averages over the chosen sites.
    """
    m = basis.n_sites
    sites = list(range(m)) if sites is None else list(sites)
    occ = basis.occupations().astype(float)
    w = np.abs(np.asarray(state)) ** 2
    ex = {}

    def avg(pattern):
        # average <prod n_i^p_i> over ordered tuples of distinct sites
        from itertools import permutations
        vals = []
        for tup in permutations(sites, len(pattern)):
            prod = np.ones_like(w)
            for s, p in zip(tup, pattern):
                prod = prod * occ[:, s] ** p
            vals.append(np.dot(w, prod))
        return float(np.mean(vals))

    n = np.mean([np.dot(w, occ[:, s]) for s in sites])
    ex["n2"] = np.mean([np.dot(w, occ[:, s] ** 2) for s in sites])
    ex["n4"] = np.mean([np.dot(w, occ[:, s] ** 4) for s in sites])
    ex["nanb"] = avg((1, 1))
    ex["na2nb"] = avg((2, 1))
    ex["na3nb"] = avg((3, 1))
    ex["na2nb2"] = avg((2, 2))
    ex["na2nbnc"] = avg((2, 1, 1)) if len(sites) >= 3 else float("nan")
    ex["nanbncnd"] = avg((1, 1, 1, 1)) if len(sites) >= 4 else float("nan")
    return AtomicStateMoments(n=float(n), source="numeric", **ex)


def moment_table(moments):
    """The headline statistics of a reference state, for reporting."""
    return {
        "mean_filling": moments.n,
        "onsite_variance": moments.onsite_variance,
        "pair_covariance": moments.pair_covariance,
        "n2": moments.n2,
    }


def superfluid_block_variance(n_atoms, n_sites, k_sites):
    """(Delta N_K)^2 = N (K/M)(1 - K/M) for the uniform superfluid."""
    frac = k_sites / n_sites
    return n_atoms * frac * (1 - frac)

"""Mode populations, component counting and entanglement measures."""

import math
from collections import defaultdict

import numpy as np


def mode_populations(basis, mode_assignment):
    """(dim, R) populations N_phi per basis state."""
    occ = basis.occupations()
    assignment = np.asarray(mode_assignment)
    r = assignment.max() + 1
    pops = np.zeros((basis.dim, r), dtype=np.int64)
    for phi in range(r):
        pops[:, phi] = occ[:, assignment == phi].sum(axis=1)
    return pops


def mode_statistics(state, basis, mode_assignment):
    """Marginal distributions of each mode population.

    Returns {mode: (values, probabilities)}.
    """
    pops = mode_populations(basis, mode_assignment)
    w = np.abs(np.asarray(state)) ** 2
    out = {}
    for phi in range(pops.shape[1]):
        vals = np.arange(pops[:, phi].max() + 1)
        probs = np.zeros(len(vals))
        np.add.at(probs, pops[:, phi], w)
        out[phi] = (vals, probs)
    return out


def count_components(values, probabilities, floor=1e-3):
    """Number of separated peaks in a (possibly multimodal) distribution."""
    p = np.asarray(probabilities, dtype=float)
    mask = p > floor * p.max()
    # peaks = maximal runs of significant weight separated by gaps
    count, inside = 0, False
    for m in mask:
        if m and not inside:
            count += 1
        inside = m
    return count


def expected_component_count(r_modes, degenerate=True):
    """Degeneracy of the measured intensity: 2 for R=2, 2R for R>2."""
    if not degenerate:
        return 1
    return 2 if r_modes == 2 else 2 * r_modes


def entanglement_entropy(state, basis, left_sites):
    """Von Neumann entropy (bits) of the reduced state of ``left_sites``."""
    left = sorted(left_sites)
    right = [s for s in range(basis.n_sites) if s not in left]
    blocks = defaultdict(dict)
    for idx, occ in enumerate(basis.states):
        lkey = tuple(occ[s] for s in left)
        rkey = tuple(occ[s] for s in right)
        blocks[lkey][rkey] = idx

    lkeys = sorted(blocks.keys())
    rkeys = sorted({rk for b in blocks.values() for rk in b})
    lmap = {k: i for i, k in enumerate(lkeys)}
    rmap = {k: i for i, k in enumerate(rkeys)}
    mat = np.zeros((len(lkeys), len(rkeys)), dtype=complex)
    psi = np.asarray(state, dtype=complex)
    for lkey, sub in blocks.items():
        for rkey, idx in sub.items():
            mat[lmap[lkey], rmap[rkey]] = psi[idx]
    svals = np.linalg.svd(mat, compute_uv=False)
    p = svals ** 2
    p = p[p > 1e-15]
    p = p / p.sum()
    return float(-(p * np.log2(p)).sum())


def schmidt_entropy(amplitudes):
    """Entropy (bits) of a state sum_n c_n |n>_A |n>_B from its amplitudes."""
    p = np.abs(np.asarray(amplitudes, dtype=float)) ** 2
    p = p[p > 1e-300]
    p = p / p.sum()
    return float(-(p * np.log2(p)).sum())


def multimode_pdc_amplitudes(lam, r_modes, n_max=None):
    """c_n of the R-mode twin state: (e^-lam lam^n / n!)^{R/2}."""
    if n_max is None:
        n_max = int(lam + 12 * math.sqrt(lam) + 20)
    n = np.arange(n_max + 1)
    from scipy.special import gammaln
    logp = n * math.log(lam) - lam - gammaln(n + 1)     # log Poisson pmf
    amps = np.exp(0.5 * r_modes * logp)
    return amps / np.linalg.norm(amps)


def multimode_pdc_entropy_limit(lam, r_modes):
    """Large-occupation entanglement (1/2) log2(2 pi e lam / R)."""
    return 0.5 * math.log2(2 * math.pi * math.e * lam / r_modes)

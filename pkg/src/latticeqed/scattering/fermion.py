"""Density and magnetization structure factors of lattice fermions."""

import numpy as np


def _site_correlations(state, basis, kind):
    """<o_i o_j> - <o_i><o_j> for o = density or magnetization."""
    up = basis.occupations("up").astype(float)
    dn = basis.occupations("down").astype(float)
    occ = up + dn if kind == "density" else up - dn
    w = np.abs(np.asarray(state)) ** 2
    means = w @ occ
    cov = (occ * w[:, None]).T @ occ - np.outer(means, means)
    return means, cov


def fermion_additions(state, basis, site_couplings):
    """(R_x, R_y): density and magnetization quantum additions.

    ``site_couplings`` is an (n_angles, M) or (M,) array of J_ii values.
    """
    amat = np.atleast_2d(np.asarray(site_couplings, dtype=complex))
    out = []
    for kind in ("density", "magnetization"):
        _, cov = _site_correlations(state, basis, kind)
        r = np.einsum("ti,tj,ij->t", np.conj(amat), amat, cov)
        out.append(np.real(r))
    rx, ry = out
    if np.ndim(site_couplings) == 1:
        return float(rx[0]), float(ry[0])
    return rx, ry


def classical_diffraction(state, basis, site_couplings, kind="magnetization"):
    """|sum_j J_jj <o_j>|^2, the coherent part of the pattern."""
    amat = np.atleast_2d(np.asarray(site_couplings, dtype=complex))
    means, _ = _site_correlations(state, basis, kind)
    val = np.abs(amat @ means) ** 2
    return float(val[0]) if np.ndim(site_couplings) == 1 else val


def magnetic_structure_factor(state, basis, q, period=1.0):
    """S(q) = (1/L) sum_ij e^{i q (x_i - x_j)} <dm_i dm_j>."""
    m = basis.n_sites
    x = period * np.arange(m)
    _, cov = _site_correlations(state, basis, "magnetization")
    phases = np.exp(1j * np.asarray(q)[..., None] * x)
    s = np.einsum("...i,...j,ij->...", phases, np.conj(phases), cov) / m
    return np.real(s)

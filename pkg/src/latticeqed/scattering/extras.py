"""Bragg conditions, free-space rates, bond intensities, molecule complexes."""
from dataclasses import dataclass, field

import numpy as np


@dataclass
class BraggPeak:
    kind: str                       # 'classical' | 'quadrature' | 'standing'
    reciprocal: np.ndarray
    mismatch: float


def bragg_peak_conditions(k_probe, k_detect, lattice, detect_kind="traveling",
                          tol=1e-6, max_order=2):
    """Which generalized diffraction conditions a 3D geometry satisfies.

    Classical: dk = G; intensity-noise/quadrature: 2 dk = G; standing-wave
    detection: 2 k_detect = G, for reciprocal vectors G of the lattice.
    """
    k_probe = np.asarray(k_probe, dtype=float)
    k_detect = np.asarray(k_detect, dtype=float)
    dk = k_probe - k_detect
    gs = lattice.reciprocal_vectors(max_order)
    peaks = []
    checks = [("classical", dk), ("quadrature", 2 * dk)]
    if detect_kind == "standing":
        checks.append(("standing", 2 * k_detect))
    scale = max(np.linalg.norm(dk), 1.0)
    for kind, vec in checks:
        mis = np.linalg.norm(gs - vec[None, :], axis=1)
        best = int(np.argmin(mis))
        if mis[best] <= tol * scale:
            peaks.append(BraggPeak(kind, gs[best], float(mis[best])))
    return peaks


def isotropic_background(moments, k_sites):
    """Uniform noise level K (<n^2> - <n>^2) / 2 when no condition is met."""
    return k_sites * moments.onsite_variance / 2.0


def free_space_rate(rabi, detuning_atom, linewidth, k_sites, moments):
    """Photons per second scattered into free space by density fluctuations."""
    return ((rabi / detuning_atom) ** 2 * linewidth * k_sites
            * moments.onsite_variance / 8.0)


def bond_intensity_meanfield(filling, order_parameter, pair_amplitude,
                             k_sites, bond_form_factor, coupling=1.0):
    """Photon number scattered from bonds at the density-dark angle.

    2 |C|^2 (K-1) F^2 [ (b2 - phi^2)^2 + (n - phi^2)(1 + n - phi^2) ]
    with phi the order parameter and b2 the on-site pair amplitude.
    """
    phi2 = order_parameter ** 2
    squeeze = pair_amplitude - phi2
    depletion = filling - phi2
    return (2.0 * abs(coupling) ** 2 * (k_sites - 1) * bond_form_factor ** 2
            * (squeeze ** 2 + depletion * (1.0 + depletion)))


def matter_quadrature_variances(filling, order_parameter, pair_amplitude):
    """(Delta X^b_{0, pi/2})^2 = 1/4 + [(n - phi^2) +/- (b2 - phi^2)]/2."""
    phi2 = order_parameter ** 2
    squeeze = pair_amplitude - phi2
    depletion = filling - phi2
    return (0.25 + (depletion + squeeze) / 2.0,
            0.25 + (depletion - squeeze) / 2.0)


# ----------------------------------------------------------------------
# few-body molecular complexes in a double tube
# ----------------------------------------------------------------------

# species composition (a, b) = molecules contributed to tubes A and B,
# with the complex count per species in units of the complex number N.
_COMPLEX_STAGES = {
    "1-1": [
        ("bound", [((1, 1), 1.0)]),
        ("free", [((1, 0), 1.0), ((0, 1), 1.0)]),
    ],
    "1-2": [
        ("bound", [((1, 2), 1.0)]),
        ("dimer+free", [((1, 1), 1.0), ((0, 1), 1.0)]),
        ("free", [((1, 0), 1.0), ((0, 1), 2.0)]),
    ],
    "1-3": [
        ("bound", [((1, 3), 1.0)]),
        ("trimer+free", [((1, 2), 1.0), ((0, 1), 1.0)]),
        ("dimer+2free", [((1, 1), 1.0), ((0, 1), 2.0)]),
        ("free", [((1, 0), 1.0), ((0, 1), 3.0)]),
    ],
    "2-2": [
        ("bound", [((2, 2), 1.0)]),
        ("two-dimers", [((1, 1), 2.0)]),
        ("dimer+2free", [((1, 1), 1.0), ((1, 0), 1.0), ((0, 1), 1.0)]),
        ("free", [((1, 0), 2.0), ((0, 1), 2.0)]),
    ],
}


def molecule_stage_names(kind):
    return [name for name, _ in _COMPLEX_STAGES[kind]]


def molecule_intensity(kind, stage, n_complexes):
    """Dark-angle photon number n_phi/|C|^2 for a dissociation stage.

    Independent species with Poisson counts give
    sum_s (a_s - alpha b_s)^2 <N_s> with alpha fixed by the bound complex.
    """
    stages = _COMPLEX_STAGES[kind]
    if isinstance(stage, str):
        names = [name for name, _ in stages]
        stage = names.index(stage)
    (a0, b0), _ = stages[0][1][0]
    alpha = a0 / b0
    total = 0.0
    for (a, b), mult in stages[stage][1]:
        total += (a - alpha * b) ** 2 * mult * n_complexes
    return total


def molecule_intensity_curve(kind, n_complexes):
    """Intensities for every dissociation stage, in order."""
    return np.array([molecule_intensity(kind, s, n_complexes)
                     for s in range(len(_COMPLEX_STAGES[kind]))])

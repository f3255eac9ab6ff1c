"""Phase labels from converged mean-field states."""

from dataclasses import dataclass

import numpy as np

DEFAULT_THRESHOLD = 1e-6


@dataclass(frozen=True)
class ClassifyThresholds:
    order: float = 1e-3          # superfluid order detection
    imbalance: float = 1e-3      # density-wave detection
    integer: float = 1e-3        # MI commensurability
    phase: float = 0.3           # dimer bond-phase detection (radians)
    fock_support: float = 1e-6


def fock_support_count(site_amplitudes, floor=1e-6):
    """Number of Fock components carrying weight in a site ground state."""
    w = np.abs(np.asarray(site_amplitudes)) ** 2
    return int((w > floor * w.max()).sum())


def phase_classify(state, thresholds=None, bond_phase_diff=None,
                   fock_components=None, maximal_imbalance=None):
    """MI(n) | SF | QS | DW(small|maximal) | SS | SFD | SSD | mixed.

    ``bond_phase_diff`` and ``fock_components`` refine the bond-ordered
    and gapped-superposition labels when available.
    """
    th = thresholds or ClassifyThresholds()
    order = state.total_order()
    imbalance = state.density_imbalance()
    rho = state.mean_density()
    dimerized = bond_phase_diff is not None and bond_phase_diff > th.phase

    if order < th.order:
        if imbalance > th.imbalance:
            if maximal_imbalance is None:
                maximal_imbalance = imbalance > 0.9 * rho
            return "DW(maximal)" if maximal_imbalance else "DW(small)"
        if abs(rho - round(rho)) < th.integer:
            return f"MI({int(round(rho))})"
        return "mixed"
    if imbalance > th.imbalance:
        if dimerized:
            return "SSD"
        return "SS"
    if dimerized:
        return "SFD"
    if fock_components is not None and fock_components <= 2:
        return "QS"
    return "SF"

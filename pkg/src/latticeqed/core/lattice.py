"""Lattice / light-mode geometry and the per-site measurement couplings.

Lengths are measured in probe wavelengths (so a half-wavelength lattice has
period 0.5) and wavevector magnitudes in units of 2*pi per wavelength.
Site couplings J_D(j) use the deep-lattice (point-like Wannier) limit;
bond couplings J_B(j) carry the Gaussian Wannier-overlap Fourier factor.
"""

import math
from dataclasses import dataclass, field

import numpy as np

MODE_CLASS_RTOL = 1e-9


@dataclass(frozen=True)
class LatticeSpec:
    """A simple lattice: site count, dimensionality, period and boundary."""

    n_sites: object = 8          # int, or per-axis tuple for dim > 1
    dim: int = 1
    period: float = 0.5          # in probe wavelengths
    boundary: str = "open"

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.dim == 1:
            if int(self.n_sites) < 1:
                raise ValueError("need at least one site")
        else:
            axes = tuple(self.n_sites)
            if len(axes) != self.dim or any(a < 1 for a in axes):
                raise ValueError("per-axis site counts must match dim")
        if self.boundary not in ("open", "periodic"):
            raise ValueError("boundary must be 'open' or 'periodic'")

    @property
    def total_sites(self):
        if self.dim == 1:
            return int(self.n_sites)
        return int(np.prod(self.n_sites))

    def positions(self):
        """Site coordinates x_j = j * period (1D)."""
        if self.dim != 1:
            raise ValueError("positions() is 1D; use positions_nd()")
        return self.period * np.arange(self.total_sites)

    def positions_nd(self):
        axes = (self.n_sites,) if self.dim == 1 else tuple(self.n_sites)
        grids = np.meshgrid(*[np.arange(a) for a in axes], indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1).astype(float)
        return self.period * pts

    def reciprocal_vectors(self, max_order=2):
        """Reciprocal vectors G = (2*pi/d) * integer vector, up to max_order."""
        base = 2 * math.pi / self.period
        rng = range(-max_order, max_order + 1)
        grids = np.meshgrid(*[list(rng)] * max(self.dim, 1), indexing="ij")
        ints = np.stack([g.ravel() for g in grids], axis=1)
        return base * ints.astype(float)


@dataclass(frozen=True)
class LightMode:
    """A probe or detection mode: traveling or standing plane wave."""

    kind: str = "traveling"
    angle: float = 0.0           # radians from the lattice normal
    wavevector: float = 1.0      # |k| in units of 2*pi / wavelength
    phase: float = 0.0
    amplitude: complex = 1.0 + 0j

    def __post_init__(self):
        if self.kind not in ("traveling", "standing"):
            raise ValueError("kind must be 'traveling' or 'standing'")
        if not math.isfinite(self.angle):
            raise ValueError("angle must be finite")
        if self.wavevector <= 0:
            raise ValueError("wavevector must be positive")

    @property
    def kx(self):
        """Wavevector projection on the lattice axis, in rad / wavelength."""
        return 2 * math.pi * self.wavevector * math.sin(self.angle)

    def plane_wave_terms(self):
        """Decompose the mode function into (coefficient, kx) exponentials."""
        if self.kind == "traveling":
            return [(np.exp(1j * self.phase), self.kx)]
        half = 0.5
        return [(half * np.exp(1j * self.phase), self.kx),
                (half * np.exp(-1j * self.phase), -self.kx)]

    def u(self, x):
        """Mode function at positions x (in wavelengths)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "traveling":
            return np.exp(1j * (self.kx * x + self.phase))
        return np.cos(self.kx * x + self.phase).astype(complex)


@dataclass(frozen=True)
class WannierParams:
    """Gaussian on-site orbital of rms width ``width`` (same units as period)."""

    depth: float = 10.0          # lattice depth in recoil energies (informative)
    width: float = 0.05

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")

    def density_form_factor(self, k):
        """Fourier factor of the squared orbital, exp(-sigma^2 k^2 / 4)."""
        return np.exp(-(self.width ** 2) * np.asarray(k) ** 2 / 4.0)

    def bond_form_factor(self, k, period):
        """Fourier factor of the nearest-neighbour orbital overlap."""
        return (np.exp(-(period ** 2) / (4.0 * self.width ** 2))
                * np.exp(-(self.width ** 2) * np.asarray(k) ** 2 / 4.0))

    def is_deep(self, period):
        return self.width < 0.2 * period


@dataclass
class MeasurementGeometry:
    """Per-site density couplings, per-bond couplings and the mode structure."""

    site_couplings: np.ndarray
    bond_couplings: np.ndarray
    mode_count: int
    mode_assignment: np.ndarray
    lattice: LatticeSpec = None
    labels: dict = field(default_factory=dict)

    @property
    def n_sites(self):
        return len(self.site_couplings)


def classify_values(values, rtol=MODE_CLASS_RTOL):
    """Group complex values that agree to relative tolerance.

    Returns (count, assignment) with assignment[i] the class of value i,
    classes numbered by order of first appearance.
    """
    values = np.asarray(values)
    scale = max(np.abs(values).max(), 1.0)
    reps = []
    assignment = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        for c, r in enumerate(reps):
            if abs(v - r) <= rtol * scale:
                assignment[i] = c
                break
        else:
            assignment[i] = len(reps)
            reps.append(v)
    return len(reps), assignment


def geometry_coefficients(probe, detect, lattice, wannier=None):
    """Measurement couplings for a probe/detection mode pair on a lattice.

    J_D(j) = conj(u_det(x_j)) * u_probe(x_j) in the point-orbital limit;
    J_B(j) integrates the same interference pattern against the Gaussian
    nearest-neighbour orbital overlap, which contributes its Fourier factor
    and evaluates the light at the bond centres x_j + d/2.
    """
    wannier = wannier or WannierParams(width=0.05 * lattice.period)
    if wannier.width >= lattice.period:
        raise ValueError("Wannier width must be below the lattice period")
    x = lattice.positions()
    d = lattice.period

    j_d = np.conj(detect.u(x)) * probe.u(x)

    n_bonds = lattice.total_sites if lattice.boundary == "periodic" else lattice.total_sites - 1
    xb = x[:n_bonds] + d / 2.0
    j_b = np.zeros(n_bonds, dtype=complex)
    for c1, k1 in detect.plane_wave_terms():
        for c0, k0 in probe.plane_wave_terms():
            dk = k0 - k1
            j_b += (np.conj(c1) * c0
                    * wannier.bond_form_factor(dk, d)
                    * np.exp(1j * dk * xb))

    count, assignment = classify_values(j_d)
    return MeasurementGeometry(
        site_couplings=j_d,
        bond_couplings=j_b,
        mode_count=count,
        mode_assignment=assignment,
        lattice=lattice,
    )


def traveling_pair(theta_probe, theta_detect, lattice, k=1.0,
                   probe_phase=0.0, detect_phase=0.0, wannier=None):
    """Convenience constructor for two traveling waves."""
    probe = LightMode("traveling", theta_probe, k, probe_phase)
    detect = LightMode("traveling", theta_detect, k, detect_phase)
    return geometry_coefficients(probe, detect, lattice, wannier)


def mode_coupling_pattern(n_sites, pattern, r_modes=2):
    """Common measured-site patterns used throughout.

    ``pattern`` one of: 'odd' (1 on odd sublattice, 0 elsewhere),
    'alternating' ((-1)^j), 'uniform', or 'roots' (exp(i 2 pi j / R)).
    Site index j counts from 0; 'odd' illuminates j = 0, 2, 4, ... which
    matches the 1-based odd sites of the usual convention.
    """
    j = np.arange(n_sites)
    if pattern == "odd":
        w = (j % 2 == 0).astype(complex)
    elif pattern == "alternating":
        w = ((-1.0) ** j).astype(complex)
    elif pattern == "uniform":
        w = np.ones(n_sites, dtype=complex)
    elif pattern == "roots":
        w = np.exp(2j * np.pi * j / r_modes)
    else:
        raise ValueError(f"unknown pattern {pattern!r}")
    return w

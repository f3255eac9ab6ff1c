"""Damped self-consistent iteration with multistart over mode patterns."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..trajectories.rng import stream
from .single_site import SiteHamiltonian, SiteSolution, solve_site

DEFAULT_TOL = 1e-9
DEFAULT_MIXING = 0.5
SLOW_MIXING = 0.1
DEFAULT_MULTISTART = 16


@dataclass
class MeanFieldState:
    """Per-mode order parameters, densities and pair amplitudes."""

    psi: np.ndarray
    rho: np.ndarray
    pair: np.ndarray
    energy: float = math.nan
    residual: float = math.inf
    converged: bool = False
    degeneracy: int = 1

    @property
    def r_modes(self):
        return len(self.psi)

    def total_order(self):
        return float(np.mean(np.abs(self.psi)))

    def density_imbalance(self):
        if self.r_modes < 2:
            return 0.0
        return float((self.rho.max() - self.rho.min()) / 2.0)

    def mean_density(self):
        return float(np.mean(self.rho))


def iterate_family(family, guess, tol=DEFAULT_TOL, max_iter=400,
                   mixing=DEFAULT_MIXING):
    """Damped fixed point psi,rho,pair -> site solves -> mix until stable."""
    state = MeanFieldState(np.array(guess.psi, dtype=complex),
                           np.array(guess.rho, dtype=float),
                           np.array(guess.pair, dtype=complex))
    mix = mixing
    prev_residual = None
    oscillations = 0
    for it in range(max_iter):
        sols = family.solve_modes(state)
        new_psi = np.array([s.psi for s in sols])
        new_rho = np.array([s.rho for s in sols])
        new_pair = np.array([s.pair_amp for s in sols])
        residual = max(np.abs(new_psi - state.psi).max(),
                       np.abs(new_rho - state.rho).max())
        if prev_residual is not None and residual > prev_residual * 1.000001:
            oscillations += 1
            if oscillations >= 3:
                mix = SLOW_MIXING
        prev_residual = residual
        state.psi = (1 - mix) * state.psi + mix * new_psi
        state.rho = (1 - mix) * state.rho + mix * new_rho
        state.pair = (1 - mix) * state.pair + mix * new_pair
        if residual < tol:
            state.residual = residual
            state.converged = True
            break
    else:
        state.residual = prev_residual if prev_residual is not None else math.inf
        state.converged = False
    state.energy = family.energy(state)
    return state


def _solve_with_shift(family, state, xi, guarded=True):
    """Mode solves with a Lagrange shift xi added to every -mu n term.

    ``guarded=False`` skips the cutoff-saturation check (used while
    bracketing the shift, where saturated probes are expected).
    """
    hams = family._site_hamiltonians(state)
    out = []
    for h in hams:
        shifted = SiteHamiltonian(hop=h.hop, pair=h.pair, u_eff=h.u_eff,
                                  lin_n=h.lin_n - xi, const=h.const,
                                  cutoff=h.cutoff)
        if guarded:
            out.append(solve_site(shifted))
        else:
            out.append(_solve_unguarded(shifted))
    return out


def _solve_unguarded(h):
    from .single_site import SiteSolution
    import numpy as _np
    mat = h.matrix()
    w, v = _np.linalg.eigh(mat)
    g = v[:, 0]
    n = _np.arange(h.cutoff + 1)
    rho = float(_np.real(_np.vdot(g, n * g)))
    sq = _np.sqrt(n[1:])
    b_g = _np.concatenate([sq * g[1:], [0.0]])
    psi = complex(_np.vdot(g, b_g))
    b2_g = _np.zeros_like(g)
    if h.cutoff >= 2:
        b2_g[: -2] = _np.sqrt(n[1:-1] * n[2:]) * g[2:]
    pair = complex(_np.vdot(g, b2_g))
    return SiteSolution(psi, rho, pair, float(w[0]) + h.const,
                        float(abs(g[-1]) ** 2))


def iterate_family_canonical(family, guess, filling, tol=DEFAULT_TOL,
                             max_iter=400, mixing=DEFAULT_MIXING,
                             xi_bracket=20.0):
    """Fixed-filling iteration: a scalar shift pins the mean density.

    Each step solves for the Lagrange shift xi such that the mean mode
    density equals ``filling`` (restores stability when the collective
    attraction would otherwise run away), then mixes the mean fields.
    Returns (state, xi): the grand-canonical solution at mu_eff = mu + xi.
    """
    state = MeanFieldState(np.array(guess.psi, dtype=complex),
                           np.array(guess.rho, dtype=float),
                           np.array(guess.pair, dtype=complex))
    mix = mixing
    xi = 0.0
    span = 0.25
    prev_residual, oscillations, smooth = None, 0, 0
    for it in range(max_iter):
        def mean_rho(x):
            sols = _solve_with_shift(family, state, x, guarded=False)
            return float(np.mean([s.rho for s in sols])), sols

        # adaptive bracket around the previous shift
        lo, hi = xi - span, xi + span
        for _ in range(16):
            r_lo, _ = mean_rho(lo)
            r_hi, _ = mean_rho(hi)
            if r_lo <= filling <= r_hi:
                break
            span = min(2.5 * span, 4 * xi_bracket)
            lo, hi = xi - span, xi + span
        else:
            raise RuntimeError("filling outside the Lagrange bracket")
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            r_mid, sols = mean_rho(mid)
            if hi - lo < 1e-12 or abs(r_mid - filling) < 1e-11:
                break
            if r_mid < filling:
                lo = mid
            else:
                hi = mid
        span = max(4 * abs(mid - xi), 1e-4)
        xi = mid
        if abs(r_mid - filling) > 1e-4:
            # degenerate integer plateau: this guess cannot honour the
            # filling constraint (needs a symmetry-broken start)
            raise RuntimeError("filling constraint not attainable here")
        sols = _solve_with_shift(family, state, xi, guarded=True)
        new_psi = np.array([s.psi for s in sols])
        new_rho = np.array([s.rho for s in sols])
        new_pair = np.array([s.pair_amp for s in sols])
        residual = max(np.abs(new_psi - state.psi).max(),
                       np.abs(new_rho - state.rho).max())
        if prev_residual is not None:
            if residual > prev_residual * 1.000001:
                oscillations += 1
                smooth = 0
                if oscillations >= 3:
                    mix = SLOW_MIXING
            else:
                smooth += 1
                if smooth >= 15:
                    mix = min(0.95, mix * 1.35)
                    smooth = 0
        prev_residual = residual
        state.psi = (1 - mix) * state.psi + mix * new_psi
        state.rho = (1 - mix) * state.rho + mix * new_rho
        state.pair = (1 - mix) * state.pair + mix * new_pair
        if residual < tol:
            state.residual = residual
            state.converged = True
            break
    else:
        state.residual = prev_residual if prev_residual is not None else math.inf
        state.converged = False
    shifted = _canonical_family(family, xi)
    # canonical energy: remove the chemical-potential term so candidates
    # converged at different shifts are comparable
    state.energy = shifted.energy(state) \
        + (family.chemical_potential + xi) * filling
    return state, xi


def _canonical_family(family, xi):
    """Copy of the family with the chemical potential raised by xi."""
    import copy
    fam = copy.copy(family)
    fam.chemical_potential = family.chemical_potential + xi
    return fam


def multistart_solve_canonical(family, r_modes, filling, seed=11,
                               tol=DEFAULT_TOL, max_iter=3000,
                               n_random=DEFAULT_MULTISTART,
                               extra_guesses=()):
    """Canonical counterpart of multistart_solve at fixed mean filling."""
    rng = stream(seed)
    guesses = _structured_guesses(r_modes, filling, rng, n_random)
    guesses.extend(extra_guesses)
    best, best_energy, best_xi, degeneracy = None, math.inf, 0.0, 0
    for g in guesses:
        try:
            state, xi = iterate_family_canonical(family, g, filling, tol=tol,
                                                 max_iter=max_iter)
        except Exception:
            continue
        if not state.converged:
            continue
        if state.energy < best_energy - 1e-9:
            best, best_energy, best_xi, degeneracy = state, state.energy, xi, 1
        elif abs(state.energy - best_energy) <= 1e-9:
            degeneracy += 1
    if best is None:
        raise RuntimeError("no canonical candidate converged")
    best.degeneracy = degeneracy
    best.mu_shift = best_xi
    return best


def _structured_guesses(r_modes, rho_scale, rng, n_random):
    ones = np.ones(r_modes)
    guesses = [
        MeanFieldState(0.3 * ones.astype(complex), rho_scale * ones,
                       0.1 * ones.astype(complex)),
        MeanFieldState(0.0 * ones.astype(complex),
                       max(round(rho_scale), 0) * ones,
                       0.0 * ones.astype(complex)),
    ]
    for k in range(r_modes if r_modes > 1 else 0):
        rho = np.full(r_modes, 1e-3)
        rho[k] = rho_scale * r_modes
        psi = np.full(r_modes, 0.05, dtype=complex)
        psi[k] = 0.4
        guesses.append(MeanFieldState(psi, rho, 0.05 * ones.astype(complex)))
    for _ in range(n_random):
        psi = (rng.uniform(0, 0.8, r_modes)
               * np.exp(2j * math.pi * rng.uniform(size=r_modes)))
        rho = rng.uniform(0.05, 2.0 * rho_scale + 0.5, r_modes)
        guesses.append(MeanFieldState(psi, rho, 0.1 * ones.astype(complex)))
    return guesses


def multistart_solve(family, r_modes, seed=11, tol=DEFAULT_TOL, max_iter=400,
                     n_random=DEFAULT_MULTISTART, rho_scale=1.0,
                     extra_guesses=()):
    """Lowest-energy converged state over structured plus random guesses."""
    rng = stream(seed)
    guesses = _structured_guesses(r_modes, rho_scale, rng, n_random)
    guesses.extend(extra_guesses)

    best, best_energy = None, math.inf
    degeneracy = 0
    for g in guesses:
        try:
            state = iterate_family(family, g, tol=tol, max_iter=max_iter)
        except Exception:
            continue
        if not state.converged:
            continue
        if state.energy < best_energy - 1e-9:
            best, best_energy, degeneracy = state, state.energy, 1
        elif abs(state.energy - best_energy) <= 1e-9:
            degeneracy += 1
            if _lexicographic_before(state, best):
                best = state
    if best is None:
        # return the least-bad unconverged state for diagnostics
        state = iterate_family(family, guesses[0], tol=tol, max_iter=max_iter)
        state.converged = False
        return state
    best.degeneracy = degeneracy
    return best


def _lexicographic_before(a, b):
    """Tie-break degenerate patterns by mode-ordered density then phase."""
    ka = np.round(np.concatenate([a.rho, np.abs(a.psi)]), 9)
    kb = np.round(np.concatenate([b.rho, np.abs(b.psi)]), 9)
    for x, y in zip(ka, kb):
        if x != y:
            return x > y
    return False

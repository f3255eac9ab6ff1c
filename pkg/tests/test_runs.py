import math

import numpy as np
import pytest

import latticeqed.trajectories as tj
from latticeqed.core import build_basis
from latticeqed.trajectories.runs import (bond_eigenspace_distribution,
                                          fermion_trajectory_run,
                                          frozen_magnetization_distribution,
                                          homodyne_component_positions,
                                          homodyne_count_phase,
                                          magnetization_distribution,
                                          odd_population_distribution,
                                          phase_measurement_run)


def test_uniform_bond_measurement_is_qnd():
    """c ~ B1 commutes with the free Hamiltonian: the eigenspace
    distribution narrows while on-site densities spread."""
    rec = phase_measurement_run("uniform", 4, 4, gamma=0.2, dt=2e-3,
                                t_final=6.0, seed=5, record_every=50)
    basis = rec.basis
    # distribution over B1 eigenvalues at start vs end
    n_sites = 4
    psi_start = np.zeros(basis.dim, complex)
    filled = tuple([4] + [0] * (n_sites - 1))
    psi_start[basis.index[filled]] = 1.0
    vals0, p0 = bond_eigenspace_distribution(psi_start, rec.bond_operator)
    valsT, pT = bond_eigenspace_distribution(rec.final_state,
                                             rec.bond_operator)

    def entropy(p):
        p = p[p > 1e-12]
        return -(p * np.log(p)).sum()

    assert entropy(pT) < entropy(p0)
    # on-site density variance grows from the localized start
    n0 = rec.observables["n0"]
    assert n0[0] == pytest.approx(4.0, abs=1e-9)
    assert n0[-1] < 3.0


def test_uniform_bond_eigenstate_is_fixed_point():
    """An eigenstate of the commuting measurement stays put."""
    rec = phase_measurement_run("uniform", 2, 4, gamma=0.3, dt=2e-3,
                                t_final=1.0, seed=8, record_every=25)
    basis = rec.basis
    mat = rec.bond_operator.matrix.toarray()
    w, v = np.linalg.eigh(mat)
    psi0 = v[:, -1]
    rec2 = phase_measurement_run("uniform", 2, 4, gamma=0.3, dt=2e-3,
                                 t_final=1.0, seed=8, psi0=psi0,
                                 record_every=25)
    overlap = abs(np.vdot(psi0, rec2.final_state))
    assert overlap > 1 - 1e-8


def test_staggered_bond_confines_to_subspace():
    """The non-commuting bond channel confines momentum-pair populations:
    <O_k> = <n_k + n_{k+pi}> freezes after the early transient."""
    from latticeqed.core import (HamiltonianSpec, build_hamiltonian, hop_op,
                                 zero_op)
    basis = build_basis(4, 8)
    m = 8
    ks = 2 * np.pi * np.arange(m) / m
    occ_ops = {}
    for ki in (1, 2):
        op = zero_op(basis)
        for pair in (ki, (ki + m // 2) % m):
            kv = ks[pair]
            for a in range(m):
                for b in range(m):
                    op = op + (np.exp(1j * kv * (a - b)) / m) \
                        * hop_op(basis, a, b)
        occ_ops[f"o{ki}"] = op
    psi0 = np.zeros(basis.dim, complex)
    psi0[basis.index[(0, 0, 1, 1, 1, 1, 0, 0)]] = 1.0
    import latticeqed.trajectories as tjm
    from latticeqed.trajectories.runs import staggered_bond_operator
    h0 = build_hamiltonian(HamiltonianSpec(tunneling=1.0, periodic=True),
                           basis)
    c = np.sqrt(2 * 0.1) * staggered_bond_operator(basis, periodic=True)
    rec = tjm.mcwf_run(h0, [tjm.JumpChannel(c)], psi0, 2e-3, 16.0, seed=3,
                       observables=occ_ops, record_every=50)
    t = rec.times
    for key in occ_ops:
        series = rec.observables[key]
        early = series[t <= 8.0]
        late = series[t >= 8.0]
        assert np.ptp(late) < 0.3 * max(np.ptp(early), 1e-9)


def test_fermion_frozen_magnetization_forbids_zero():
    vals = np.arange(-4, 5, 2.0)
    p0 = np.exp(-vals ** 2 / 8.0)
    p0 /= p0.sum()
    v, p = frozen_magnetization_distribution(vals, p0, m_counts=1, tau=0.1)
    assert p[v == 0.0][0] == 0.0
    assert p.sum() == pytest.approx(1.0)


def test_fermion_afm_structure_factor_grows():
    from latticeqed.scattering import magnetic_structure_factor
    rec = fermion_trajectory_run("afm", 6, 3, 3, gamma=1.0, dt=1e-3,
                                 t_final=4.0, seed=2, record_every=100)
    basis = rec.basis
    from latticeqed.core import (HamiltonianSpec, build_hamiltonian,
                                 ground_state)
    h0 = build_hamiltonian(HamiltonianSpec(tunneling=1.0,
                                           statistics="fermion",
                                           periodic=True), basis)
    _, psi_g = ground_state(h0)
    q_afm = np.pi  # staggered wavevector in units of 1 / period
    s_ground = magnetic_structure_factor(psi_g, basis, q_afm)
    s_final = magnetic_structure_factor(rec.final_state, basis, q_afm)
    assert s_final > s_ground


def _pair_run_setup(gamma=0.1):
    from latticeqed.core import (HamiltonianSpec, build_hamiltonian,
                                 ground_state)
    from latticeqed.trajectories.runs import fermion_measurement_operators
    basis = build_basis((3, 3), 6, "fermion")
    h0 = build_hamiltonian(HamiltonianSpec(tunneling=1.0, interaction=-10.0,
                                           statistics="fermion",
                                           periodic=True), basis)
    _, psi0 = ground_state(h0)
    odd = (np.arange(6) % 2 == 0).astype(float)
    dx, dy = fermion_measurement_operators(basis, odd)
    pops = (basis.occupations("up")
            + basis.occupations("down"))[:, [0, 2, 4]].sum(axis=1)
    odd_mask = pops % 2 == 1

    def odd_weight(psi):
        return float((np.abs(psi) ** 2)[odd_mask].sum())

    return basis, h0, psi0, dx, dy, odd_weight


def test_fermion_pair_protection_no_count_record():
    """Measuring density and magnetization together: the no-count record
    never grows unpaired weight beyond the virtual dressing of the
    paired ground state."""
    gamma = 0.1
    _, h0, psi0, dx, dy, odd_weight = _pair_run_setup(gamma)
    heff = tj.effective_hamiltonian(
        h0, [tj.JumpChannel(np.sqrt(2 * gamma) * dx),
             tj.JumpChannel(np.sqrt(2 * gamma) * dy)])
    ts, recs, _ = tj.evolve_nonhermitian(heff, psi0, 1e-3, 15.0,
                                         observables={"w": odd_weight},
                                         record_every=200)
    assert recs["w"].max() <= recs["w"][0] + 0.01
    assert recs["w"][-1] <= recs["w"][0]


def test_fermion_pair_break_grows_odd_support():
    """Density-only detection amplifies broken-pair components well above
    the ground-state dressing level."""
    gamma = 0.1
    _, h0, psi0, dx, dy, odd_weight = _pair_run_setup(gamma)
    grew = 0
    for seed in (2, 3):
        rec = tj.mcwf_run(h0, [tj.JumpChannel(np.sqrt(2 * gamma) * dx)],
                          psi0, 1e-3, 15.0, seed,
                          observables={"w": odd_weight}, record_every=200)
        if rec.observables["w"].max() > 0.3:
            grew += 1
    assert grew >= 1


def test_homodyne_cat_formulas():
    flux, kappa, cpl = 4.0, 1.0, 0.5
    # quadrature mixing: kick vanishes as the rate approaches the floor
    assert homodyne_count_phase(flux, flux, math.pi / 2) == pytest.approx(0.0)
    kick = homodyne_count_phase(flux, 6.0, math.pi / 2)
    assert kick == pytest.approx(2 * math.atan(math.sqrt(2.0 / flux)))
    # in-phase mixing flips the parity each count
    assert homodyne_count_phase(flux, 6.0, 0.0) == pytest.approx(math.pi)
    zp, zm = homodyne_component_positions(flux, kappa, cpl, 6.0, math.pi / 2)
    scale = math.sqrt(flux / (2 * kappa * cpl ** 2))
    assert zp == pytest.approx(scale * math.sqrt(0.5))
    assert zm == pytest.approx(-scale * math.sqrt(0.5))
    with pytest.raises(ValueError):
        homodyne_component_positions(flux, kappa, cpl, 0.5, math.pi / 2)


def test_homodyne_run_produces_counts():
    rec = tj.homodyne_jump_run(flux=2.0, theta=0.0, n_atoms=12, gamma=0.05,
                               dt=1e-3, t_final=4.0, seed=5)
    assert rec.jump_count > 0
    # the squared difference stays symmetric around zero mean
    assert abs(rec.observables["difference"][-1]) <= 12.0


def test_magnetization_distribution_helper():
    basis = build_basis((1, 1), 2, "fermion")
    psi = np.zeros(basis.dim, complex)
    # up on site 0, down on site 1: magnetization profile (1, -1)
    psi[basis.index[(0b01, 0b10)]] = 1.0
    vals, probs = magnetization_distribution(psi, basis)
    assert vals[probs.argmax()] == pytest.approx(0.0)
    stag = magnetization_distribution(psi, basis,
                                      weights=np.array([1.0, -1.0]))
    assert stag[0][stag[1].argmax()] == pytest.approx(2.0)


def test_qnd_variance_non_increasing_no_jump():
    """Commuting (uniform-bond) channel: the measured-observable variance
    never grows along the no-count record."""
    from latticeqed.core import HamiltonianSpec, build_hamiltonian
    from latticeqed.trajectories.runs import uniform_bond_operator
    basis = build_basis(3, 4)
    h0 = build_hamiltonian(HamiltonianSpec(tunneling=1.0, periodic=True),
                           basis)
    bond = uniform_bond_operator(basis, periodic=True)
    gamma = 0.2
    heff = tj.effective_hamiltonian(
        h0, [tj.JumpChannel(np.sqrt(2 * gamma) * bond)])
    rng = np.random.default_rng(4)
    psi0 = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    psi0 /= np.linalg.norm(psi0)
    b2 = bond @ bond

    def variance(psi):
        m1 = float(np.real(np.vdot(psi, bond.matrix @ psi)))
        m2 = float(np.real(np.vdot(psi, b2.matrix @ psi)))
        return m2 - m1 ** 2

    ts, recs, _ = tj.evolve_nonhermitian(heff, psi0, 1e-3, 4.0,
                                         observables={"var": variance},
                                         record_every=40)
    assert np.all(np.diff(recs["var"]) <= 1e-9)


def test_frozen_distribution_matches_jump_engine():
    """Analytic reshaping equals the frozen-tunneling jump engine state."""
    n = 14
    gamma = 0.05
    h0 = tj.twomode_hamiltonian(n, 0.0)          # tunneling frozen
    d_op = tj.twomode_population(n, "difference")
    c = tj.twomode_jump(n, gamma, "difference")
    psi0 = tj.twomode_superfluid(n)
    t_final = 2.0
    rec = tj.mcwf_run(h0, [tj.JumpChannel(c)], psi0, 1e-3, t_final, seed=8,
                      observables={}, record_every=10 ** 9)
    m = rec.jump_count
    z = np.asarray(d_op.diagonal()).real
    p0 = np.abs(psi0) ** 2
    tau = 2 * gamma * t_final
    weights = np.exp(-(z ** 2) * tau) * (np.abs(z) ** (2 * m))
    expect = weights * p0
    expect /= expect.sum()
    got = np.abs(rec.final_state) ** 2
    assert np.abs(got - expect).max() < 1e-8

"""Config-driven command line: scatter / trajectory / feedback / phasediagram.

Flags: --config PATH --seed N --workers N --out DIR --list-examples.
Configs are JSON with a strict key schema (unknown keys are rejected with
the offending path). Outputs are CSV (%.12e floats) plus a JSON manifest
with content hashes. Exit codes: 0 success, 2 config error, 3 numerical
non-convergence.
"""

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io as qio

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


# ----------------------------------------------------------------------
# schema validation
# ----------------------------------------------------------------------

def _expect(mapping, path, schema):
    """Check ``mapping`` against {key: (type, required, default)}."""
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in mapping:
        if key not in schema:
            raise ConfigError(f"{path}.{key}: unknown key")
    out = {}
    for key, (kind, required, default) in schema.items():
        if key in mapping:
            val = mapping[key]
            if kind is float and isinstance(val, int):
                val = float(val)
            if kind is not None and not isinstance(val, kind):
                raise ConfigError(
                    f"{path}.{key}: expected {getattr(kind, '__name__', kind)}")
            out[key] = val
        elif required:
            raise ConfigError(f"{path}.{key}: missing required key")
        else:
            out[key] = default
    return out


_ANGULAR = {
    "state": (str, True, None), "n_atoms": (int, True, None),
    "n_sites": (int, True, None), "k_sites": (int, False, None),
    "theta_probe": (float, False, 0.0), "n_angles": (int, False, 720),
    "period": (float, False, 0.5), "lo_phase": (float, False, 0.0),
    "angle_unit": (str, False, "radian"),
}

_TRANSMISSION = {
    "state": (str, True, None), "n_atoms": (int, True, None),
    "n_sites": (int, True, None), "k_sites": (int, True, None),
    "kappa": (float, True, None), "u11": (float, False, 1.0),
    "drive": (float, False, 1.0), "mode": (str, False, "single"),
    "n_points": (int, False, 2001),
}

_MOLECULE = {
    "kind": (str, True, None), "n_complexes": (float, True, None),
}

_MCWF = {
    "n_atoms": (int, True, None), "n_sites": (int, True, None),
    "tunneling": (float, False, 1.0), "interaction": (float, False, 0.0),
    "gamma": (float, True, None), "pattern": (str, False, "odd"),
    "dt": (float, False, 1e-3), "t_final": (float, True, None),
    "n_trajectories": (int, False, 1), "record_every": (int, False, 100),
    "periodic": (bool, False, False),
}

_ZENO = {
    "gamma": (float, False, 100.0), "t_final": (float, False, 5.0),
    "dt": (float, False, 1e-3), "record_every": (int, False, 100),
}

_FEED_MARKOV = {
    "n_atoms": (int, True, None), "gamma": (float, True, None),
    "gain": (float, True, None), "dt": (float, False, 1e-4),
    "t_final": (float, True, None), "record_every": (int, False, 100),
}

_FEED_FPT = {
    "s_values": (list, True, None), "omega_r": (float, False, 1.0),
    "coupling": (float, False, 1.0), "kappa": (float, False, 100.0),
    "detuning": (float, False, 1.0), "lo_phase": (float, False, math.pi / 4),
    "n_samples": (int, False, 10),
}

_PD_DENSITY = {
    "r_modes": (int, False, 2), "g_eff_ns": (float, True, None),
    "interaction": (float, False, 1.0), "n_sites": (int, False, 100),
    "zt_values": (list, True, None), "filling_values": (list, True, None),
    "cutoff": (int, False, 10), "n_random": (int, False, 4),
}

_PD_DESIGNER = {
    "target": (str, True, None), "r_modes": (int, False, 5),
    "scheme": (str, False, "multi-probe"),
}

_TOP = {
    "task": (str, True, None), "name": (str, False, None),
    "mode": (str, False, None), "kind": (str, False, None),
    "angular": (dict, False, None), "transmission": (dict, False, None),
    "molecule": (dict, False, None), "mcwf": (dict, False, None),
    "zeno": (dict, False, None), "markovian": (dict, False, None),
    "fpt": (dict, False, None), "density": (dict, False, None),
    "designer": (dict, False, None),
}


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return _expect(raw, "$", _TOP)


# ----------------------------------------------------------------------
# task drivers
# ----------------------------------------------------------------------

def _moments_for(state_name, n_atoms, n_sites):
    from .scattering import (coherent_moments, insulator_moments,
                             superfluid_moments)
    if state_name == "MI":
        return insulator_moments(round(n_atoms / n_sites))
    if state_name == "SF":
        return superfluid_moments(n_atoms, n_sites)
    if state_name == "coherent":
        return coherent_moments(n_atoms / n_sites)
    raise ConfigError(f"$.angular.state: unknown state {state_name!r}")


def run_scatter(cfg, seed, out_dir, name, workers):
    from .scattering import (AngularSweep, classical_intensity,
                             molecule_intensity_curve,
                             number_distribution_mi, number_distribution_sf,
                             photon_number_variance, quadrature_variance,
                             quantum_addition, transmission_spectrum)
    mode = cfg["mode"] or "angular"
    outputs = []
    if mode == "angular":
        sub = _expect(cfg["angular"] or {}, "$.angular", _ANGULAR)
        if sub["angle_unit"] not in ("radian",):
            raise ConfigError("$.angular.angle_unit: only 'radian' supported")
        k = sub["k_sites"] or sub["n_sites"]
        sweep = AngularSweep(theta_probe=sub["theta_probe"],
                             theta_grid=np.linspace(-np.pi, np.pi,
                                                    sub["n_angles"],
                                                    endpoint=False),
                             k_sites=k, period=sub["period"])
        mom = _moments_for(sub["state"], sub["n_atoms"], sub["n_sites"])
        r = quantum_addition(mom, sweep)
        cl = classical_intensity(mom, sweep)
        qv = quadrature_variance(mom, sweep, sub["lo_phase"])
        pv = photon_number_variance(mom, sweep)
        path = os.path.join(out_dir, f"{name}.csv")
        qio.write_csv(path,
                      ["angle", "R", "classical_intensity",
                       "quadrature_variance", "photon_number_variance"],
                      zip(sweep.theta_grid, r, cl, qv, pv))
        outputs.append(path)
    elif mode == "transmission":
        sub = _expect(cfg["transmission"] or {}, "$.transmission",
                      _TRANSMISSION)
        if sub["kappa"] <= 0:
            raise ConfigError("$.transmission.kappa: must be positive")
        if sub["state"] == "SF":
            q, p = number_distribution_sf(sub["n_atoms"], sub["k_sites"],
                                          sub["n_sites"])
        else:
            q, p = number_distribution_mi(
                sub["n_atoms"] * sub["k_sites"] / sub["n_sites"],
                sub["n_atoms"])
        res = transmission_spectrum(q, p, sub["kappa"], sub["u11"],
                                    sub["drive"], sub["mode"],
                                    n_total=sub["n_atoms"])
        idx = np.linspace(0, len(res.detuning) - 1, sub["n_points"]
                          ).astype(int)
        path = os.path.join(out_dir, f"{name}.csv")
        qio.write_csv(path, ["detuning", "photon_number"],
                      zip(res.detuning[idx], res.photon_number[idx]))
        outputs.append(path)
    elif mode == "molecule":
        sub = _expect(cfg["molecule"] or {}, "$.molecule", _MOLECULE)
        curve = molecule_intensity_curve(sub["kind"], sub["n_complexes"])
        path = os.path.join(out_dir, f"{name}.csv")
        qio.write_csv(path, ["stage", "intensity"],
                      [(float(i), v) for i, v in enumerate(curve)])
        outputs.append(path)
    else:
        raise ConfigError(f"$.mode: unknown scatter mode {mode!r}")
    return outputs


def _one_trajectory(args):
    """Worker for trajectory ensembles (must be picklable)."""
    (sub, seed, index) = args
    from .core import (HamiltonianSpec, build_basis, build_hamiltonian,
                       mode_coupling_pattern, weighted_number_sum)
    from .trajectories import JumpChannel, mcwf_run, stream

    basis = build_basis(sub["n_atoms"], sub["n_sites"])
    spec = HamiltonianSpec(tunneling=sub["tunneling"],
                           interaction=sub["interaction"],
                           periodic=sub["periodic"])
    h0 = build_hamiltonian(spec, basis)
    weights = mode_coupling_pattern(sub["n_sites"], sub["pattern"])
    d_op = weighted_number_sum(basis, weights)
    c = np.sqrt(2 * sub["gamma"]) * d_op
    from .core.hamiltonian import ground_state
    _, psi0 = ground_state(h0)
    obs = {"measured": d_op, "measured_sq": d_op @ d_op}
    rec = mcwf_run(h0, [JumpChannel(c)], psi0, sub["dt"], sub["t_final"],
                   seed, observables=obs, record_every=sub["record_every"],
                   rng=stream(seed, index))
    return index, rec.times, rec.observables, rec.jump_count


def run_trajectory(cfg, seed, out_dir, name, workers):
    kind = cfg["kind"] or "mcwf"
    outputs = []
    if kind == "mcwf":
        sub = _expect(cfg["mcwf"] or {}, "$.mcwf", _MCWF)
        n_traj = sub["n_trajectories"]
        tasks = [(sub, seed, i) for i in range(n_traj)]
        if workers > 1 and n_traj > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = sorted(pool.map(_one_trajectory, tasks))
        else:
            results = sorted(map(_one_trajectory, tasks))
        all_obs = []
        for index, times, obs, n_jumps in results:
            path = os.path.join(out_dir, f"{name}.traj{index:04d}.csv")
            qio.write_csv(path,
                          ["t", "measured", "measured_sq", "jumps_so_far"],
                          zip(times, obs["measured"], obs["measured_sq"],
                              [float(n_jumps)] * len(times)))
            outputs.append(path)
            all_obs.append(obs["measured"])
        stack = np.array(all_obs)
        mean = stack.mean(axis=0)
        serr = (stack.std(axis=0, ddof=1) / math.sqrt(len(stack))
                if len(stack) > 1 else np.zeros_like(mean))
        path = os.path.join(out_dir, f"{name}.ensemble.csv")
        qio.write_csv(path, ["t", "mean_measured", "stderr_measured"],
                      zip(results[0][1], mean, serr))
        outputs.append(path)
    elif kind == "zeno_three_site":
        sub = _expect(cfg["zeno"] or {}, "$.zeno", _ZENO)
        outputs.append(_run_zeno_three_site(sub, out_dir, name))
    else:
        raise ConfigError(f"$.kind: unknown trajectory kind {kind!r}")
    return outputs


def _run_zeno_three_site(sub, out_dir, name):
    from .core import (HamiltonianSpec, build_basis, build_hamiltonian,
                       number_op)
    from .trajectories import evolve_nonhermitian, zeno_effective

    basis = build_basis(3, 3)
    h0 = build_hamiltonian(HamiltonianSpec(tunneling=1.0), basis)
    gam = sub["gamma"]
    c = np.sqrt(2 * gam) * number_op(basis, 1)
    gen = zeno_effective(h0, c, np.sqrt(2 * gam))
    idx = {s: i for i, s in enumerate(basis.states)}
    psi0 = np.zeros(basis.dim, dtype=complex)
    psi0[idx[(2, 1, 0)]] = 1.0
    keys = [(2, 1, 0), (1, 1, 1), (0, 1, 2)]
    obs = {f"p{k}": (lambda s, k=k: float(abs(s[idx[k]]) ** 2)) for k in keys}
    times, recs, _ = evolve_nonhermitian(gen, psi0, sub["dt"], sub["t_final"],
                                         observables=obs,
                                         record_every=sub["record_every"])
    path = os.path.join(out_dir, f"{name}.csv")
    qio.write_csv(path, ["t"] + [f"p{k}" for k in keys],
                  zip(times, *[recs[f"p{k}"] for k in keys]))
    return path


def run_feedback(cfg, seed, out_dir, name, workers):
    kind = cfg["kind"] or "fpt"
    outputs = []
    if kind == "markovian":
        sub = _expect(cfg["markovian"] or {}, "$.markovian", _FEED_MARKOV)
        from .feedback import markovian_feedback_run
        rec = markovian_feedback_run(sub["n_atoms"], sub["gamma"],
                                     sub["gain"], sub["dt"], sub["t_final"],
                                     seed, record_every=sub["record_every"])
        path = os.path.join(out_dir, f"{name}.csv")
        qio.write_csv(path, ["t", "imbalance", "imbalance_sq",
                             "jumps_so_far"],
                      zip(rec.times, rec.observables["d"],
                          rec.observables["d_sq"],
                          [float(rec.jump_count)] * len(rec.times)))
        outputs.append(path)
    elif kind == "fpt":
        sub = _expect(cfg["fpt"] or {}, "$.fpt", _FEED_FPT)
        from .feedback import (FeedbackResponse, SpinLightModel,
                               critical_exponent_fit)
        model = SpinLightModel(omega_r=sub["omega_r"],
                               coupling=sub["coupling"], kappa=sub["kappa"],
                               detuning=sub["detuning"],
                               lo_phase=sub["lo_phase"])
        rows, report = [], {}
        for s_exp in sub["s_values"]:
            resp = FeedbackResponse("power-law", h0=float(s_exp), t0=1.0,
                                    exponent=float(s_exp))
            rep = critical_exponent_fit(model, resp,
                                        n_samples=sub["n_samples"])
            rows.append((float(s_exp), rep.exponent, rep.gain_critical,
                         rep.residual))
            report[str(s_exp)] = {
                "alpha": rep.exponent, "gain_critical": rep.gain_critical,
                "amplitude": rep.amplitude, "offset": rep.offset,
                "residual": rep.residual,
                "gains": list(map(float, rep.gains)),
                "variances": list(map(float, rep.variances)),
            }
        path = os.path.join(out_dir, f"{name}.csv")
        qio.write_csv(path, ["s", "alpha", "gain_critical", "fit_residual"],
                      rows)
        outputs.append(path)
        jpath = os.path.join(out_dir, f"{name}.report.json")
        qio.write_json(jpath, report)
        outputs.append(jpath)
    else:
        raise ConfigError(f"$.kind: unknown feedback kind {kind!r}")
    return outputs


def _one_diagram_point(args):
    (sub, zt, filling, seed) = args
    from .meanfield import (DensityModeFamily, phase_classify,
                            solve_fixed_filling)
    if sub["r_modes"] == 2:
        chi = np.array([1.0, -1.0], dtype=complex)
    else:
        chi = np.exp(2j * np.pi * np.arange(sub["r_modes"]) / sub["r_modes"])
    fam = DensityModeFamily(chi=chi, g_eff=sub["g_eff_ns"] / sub["n_sites"],
                            interaction=sub["interaction"],
                            chemical_potential=0.0, zt0=zt,
                            n_sites=sub["n_sites"], cutoff=sub["cutoff"])
    try:
        st, _ = solve_fixed_filling(fam, filling, seed=seed,
                                    n_random=sub["n_random"])
    except RuntimeError:
        return (zt, filling, "unconverged", 0.0, 0.0, math.nan, 0.0)
    return (zt, filling, phase_classify(st), st.total_order(),
            st.density_imbalance(), st.energy, 1.0)


def run_phasediagram(cfg, seed, out_dir, name, workers):
    kind = cfg["kind"] or "density"
    outputs = []
    if kind == "density":
        sub = _expect(cfg["density"] or {}, "$.density", _PD_DENSITY)
        if not sub["zt_values"] or not sub["filling_values"]:
            raise ConfigError("$.density: grids must be non-empty")
        tasks = [(sub, float(zt), float(f), seed)
                 for zt in sub["zt_values"] for f in sub["filling_values"]]
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_one_diagram_point, tasks))
        else:
            results = list(map(_one_diagram_point, tasks))
        path = os.path.join(out_dir, f"{name}.csv")
        qio.write_csv(path,
                      ["x", "y", "phase_label", "sum_psi", "delta_rho",
                       "energy", "converged"],
                      [(zt, f, label, order, imb, en, conv)
                       for zt, f, label, order, imb, en, conv in results])
        outputs.append(path)
    elif kind == "designer":
        sub = _expect(cfg["designer"] or {}, "$.designer", _PD_DESIGNER)
        from .meanfield import (bessel_profile, design_cavity_couplings,
                                design_probe_amplitudes, morse_profile,
                                multi_cavity_profile, multi_probe_profile,
                                yukawa_profile)
        r = sub["r_modes"]
        target = {"yukawa": yukawa_profile, "morse": morse_profile,
                  "bessel": bessel_profile}.get(sub["target"])
        if target is None:
            raise ConfigError(f"$.designer.target: unknown {sub['target']!r}")
        v = target(r)
        if sub["scheme"] == "multi-probe":
            g = design_probe_amplitudes(v)
            _, v_back = multi_probe_profile(g)
            payload = {"scheme": "multi-probe", "target": list(map(float, v)),
                       "couplings_re": list(np.real(g)),
                       "couplings_im": list(np.imag(g)),
                       "reconstructed_re": list(np.real(v_back)),
                       "reconstructed_im": list(np.imag(v_back))}
        else:
            g = design_cavity_couplings(v)
            _, v_back = multi_cavity_profile(g)
            payload = {"scheme": "multi-cavity",
                       "target": list(map(float, v)),
                       "couplings_re": list(map(float, g)),
                       "reconstructed_re": list(map(float, v_back))}
        path = os.path.join(out_dir, f"{name}.designer.json")
        qio.write_json(path, payload)
        outputs.append(path)
    else:
        raise ConfigError(f"$.kind: unknown diagram kind {kind!r}")
    return outputs


TASKS = {
    "scatter": run_scatter,
    "trajectory": run_trajectory,
    "feedback": run_feedback,
    "phasediagram": run_phasediagram,
}


def example_configs():
    """Shipped example configs (name -> path)."""
    base = os.path.join(os.path.dirname(__file__), "configs")
    out = {}
    if os.path.isdir(base):
        for fn in sorted(os.listdir(base)):
            if fn.endswith(".json"):
                out[fn[:-5]] = os.path.join(base, fn)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="latticeqed",
        description="cavity-lattice simulators: scattering, trajectories, "
                    "feedback, phase diagrams")
    parser.add_argument("--config", help="path to a JSON run config")
    parser.add_argument("--seed", type=int, default=1234)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default=".")
    parser.add_argument("--list-examples", action="store_true")
    args = parser.parse_args(argv)

    if args.list_examples:
        for name, path in example_configs().items():
            print(f"{name}\t{path}")
        return 0
    if not args.config:
        parser.error("--config is required unless --list-examples is given")

    try:
        cfg = load_config(args.config)
        task = cfg["task"]
        if task not in TASKS:
            raise ConfigError(f"$.task: unknown task {cfg['task']!r}")
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    name = cfg["name"] or os.path.splitext(os.path.basename(args.config))[0]
    os.makedirs(args.out, exist_ok=True)
    started = time.time()
    try:
        outputs = TASKS[task](cfg, args.seed, args.out, name, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    qio.write_manifest(args.out, name, cfg, args.seed, outputs,
                       time.time() - started)
    for p in outputs:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())

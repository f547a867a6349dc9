"""``ccarray`` command line front end.

Exit codes: 0 success, 2 usage error (unknown flag or config key),
3 invalid parameter, 4 output not writable, 5 numerical failure,
6 verification failed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import hardware, oracle, scattering, spectral
from .lattice import Impurity, LatticeSpec, ModelError, build_hamiltonian
from .output import SCHEMA_VERSION, emit_table, render_json, states_document, write_text
from .parsing import parse_angle, parse_angle_list, parse_number_list, parse_quantity, parse_sweep

EXIT_OK, EXIT_USAGE, EXIT_PARAM, EXIT_IO, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4, 5, 6
OUTPUT_DIR_ENV = "CCARRAY_OUTPUT_DIR"


class OutputError(OSError):
    pass


# ------------------------------------------------------------------ helpers


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    cfg = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


def _resolve_output(path):
    if path is None or path == "-":
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _write(args, text: str):
    target = _resolve_output(args.output)
    if target is None:
        sys.stdout.write(text)
        return
    try:
        write_text(text, target)
    except OSError as exc:
        raise OutputError(f"cannot write {target}: {exc}") from exc


def _emit(args, rows, columns, json_doc=None):
    if args.format == "json" and json_doc is not None:
        _write(args, render_json(json_doc))
    else:
        _write(args, emit_table(rows, columns, args.format))


def _model_params(args) -> dict:
    return {"omega_c": args.omega_c, "hopping": args.hopping}


# ----------------------------------------------------------------- commands


def cmd_reflect(args):
    """Reflection sweeps over lambda or k for one or two cavities."""
    fixed = dict(omega_c=args.omega_c, hopping=args.hopping)
    if args.mode == "double":
        fixed["d"] = args.d
    rows = []
    if args.k_sweep:
        rng = parse_sweep(args.k_sweep, angle=True)
        for lam in parse_number_list(args.lam):
            rows += scattering.sweep(args.mode, "k", rng.start, rng.stop, rng.count, lam=lam, **fixed)
    else:
        rng = parse_sweep(args.lambda_sweep)
        for k in parse_angle_list(args.k):
            rows += scattering.sweep(args.mode, "lambda", rng.start, rng.stop, rng.count, k=k, **fixed)
    _emit(args, rows, scattering.SWEEP_COLUMNS)


BAND_POLE_COLUMNS = ("schema_version", "kind", "omega", "f1")


def cmd_bound(args):
    params = _model_params(args)
    if args.mode == "single":
        lam = float(args.lam)
        st = spectral.bound_state_single(lam, **params)
        doc = states_document("single_bound", dict(params, **{"lambda": lam}), [st], {"mu": spectral.single_mu(lam, **params)})
        _write(args, render_json(doc))
    elif args.mode == "double":
        states = spectral.double_bound_states(args.lambda0, args.d, window=args.window, **params)
        doc = states_document("double_bound", dict(params, lambda0=args.lambda0, d=args.d), states)
        _write(args, render_json(doc))
    else:
        lam = float(args.lam)
        n = args.n
        roots = spectral.band_pole_roots(lam, n, **params)
        poles = spectral.band_poles(n, **params)
        span = abs(lam) * args.omega_c + 4 * args.hopping
        lo, hi = min(poles[0], roots[0]) - 0.2 * span, max(poles[-1], roots[-1]) + 0.2 * span
        omega = np.linspace(lo, hi, args.samples)
        # a sample landing on a pole would print inf; those are rare but legal
        with np.errstate(divide="ignore"):
            f1 = spectral.band_pole_function(omega, lam, n, **params)
        rows = [dict(schema_version=SCHEMA_VERSION, kind="sample", omega=w, f1=v) for w, v in zip(omega, f1)]
        rows += [dict(schema_version=SCHEMA_VERSION, kind="root", omega=r, f1=1.0) for r in roots]
        doc = dict(schema_version=SCHEMA_VERSION, kind="band_pole", params=dict(params, n_sites=n, **{"lambda": lam}),
                   roots=list(roots), band=[args.omega_c - 2 * args.hopping, args.omega_c + 2 * args.hopping])
        _emit(args, rows, BAND_POLE_COLUMNS, doc)


def cmd_resonant(args):
    params = _model_params(args)
    st = spectral.resonant_state(args.m, args.d, args.parity, args.lambda0, threshold=args.threshold, window=args.window, **params)
    doc = states_document("resonant", dict(params, d=args.d, m=args.m, lambda0=args.lambda0), [st], {"valid": st.valid})
    _write(args, render_json(doc))


def _oracle_impurities(args):
    if args.mode == "single":
        return [Impurity(0, float(args.lam))]
    return [Impurity(-args.d, args.lambda0), Impurity(args.d, args.lambda0)]


PACKET_COLUMNS = ("schema_version", "time", "left", "right", "region", "between", "norm")


def cmd_oracle(args):
    params = _model_params(args)
    if args.task == "spectrum":
        spec = LatticeSpec(args.n, impurities=_oracle_impurities(args), boundary=args.boundary, **params)
        spectrum = oracle.diagonalize(spec)
        if args.mode == "single":
            preds = [spectral.bound_state_single(float(args.lam), **params)]
        else:
            preds = spectral.double_bound_states(args.lambda0, args.d, **params)
        report = oracle.match_bound_states(spectrum, preds, args.energy_tol, args.fidelity_tol)
        band = (args.omega_c - 2 * args.hopping, args.omega_c + 2 * args.hopping)
        in_band = spectrum.count_in(*band)
        spectral_residual = spectrum.max_residual(build_hamiltonian(spec))
        doc = dict(
            schema_version=SCHEMA_VERSION, kind="oracle_spectrum",
            params=dict(params, n_sites=args.n, mode=args.mode, **_mode_params(args)),
            eigenvalues=list(spectrum.eigenvalues), in_band=in_band,
            band_count_ok=in_band == args.n - len(preds),
            max_residual=spectral_residual, match=report.as_dict(),
            passed=report.passed and in_band == args.n - len(preds),
        )
        _write(args, render_json(doc))
        return EXIT_OK if doc["passed"] else EXIT_VERIFY
    k0 = parse_angle(args.k0)
    spec, x0, duration = oracle.plan_packet_run(_oracle_impurities(args), k0, args.width, **params)
    if args.duration is not None:
        duration = args.duration
    run = oracle.evolve_packet(spec, k0, args.width, x0, duration, n_samples=args.samples)
    if args.format == "csv":
        rows = [dict(schema_version=SCHEMA_VERSION, time=t, left=a, right=b, region=c, between=e, norm=n)
                for t, a, b, c, e, n in zip(run.times, run.left, run.right, run.region, run.between, run.norm)]
        _write(args, emit_table(rows, PACKET_COLUMNS, "csv"))
        return EXIT_OK
    if args.mode == "single":
        stationary = scattering.reflect_single(k0, float(args.lam), **params).T
    else:
        stationary = scattering.reflect_double(k0, args.lambda0, args.d, **params).T
    doc = dict(
        schema_version=SCHEMA_VERSION, kind="oracle_packet",
        params=dict(params, n_sites=spec.n_sites, k0=k0, width=args.width, x0=x0, duration=duration, mode=args.mode, **_mode_params(args)),
        T_measured=run.T_measured, R_measured=run.R_measured, residual=run.residual,
        T_stationary=stationary, norm_drift=run.norm_drift, max_between=float(run.between.max()),
    )
    _write(args, render_json(doc))
    return EXIT_OK


def _mode_params(args) -> dict:
    if args.mode == "single":
        return {"lambda": float(args.lam)}
    return {"lambda0": args.lambda0, "d": args.d}


def _energy(text: str) -> float:
    q = parse_quantity(text, ("J", "Hz"))
    value = float(q)
    return value * hardware.PLANCK if q.unit == "Hz" else value


def cmd_hardware(args):
    if args.task == "dispersion":
        rng = parse_sweep(args.flux_sweep)
        rows = []
        columns = ["schema_version", "flux_quanta", "f", "ej_f", "load"] + [f"u{m + 1}" for m in range(args.modes)]
        for flux in np.linspace(rng.start, rng.stop, rng.count):
            f = 2 * math.pi * flux
            params = hardware.HardwareParams(
                E_J=_energy(args.ej), f=f, C_s=float(parse_quantity(args.cs, ("F",))),
                l0=float(parse_quantity(args.length, ("m",))),
                C0=float(parse_quantity(args.c_per_length, ("F/m",))),
                L0=float(parse_quantity(args.l_per_length, ("H/m",))),
            )
            roots = hardware.dispersion_roots(params, args.modes)
            row = dict(schema_version=SCHEMA_VERSION, flux_quanta=flux, f=f,
                       ej_f=hardware.effective_josephson_energy(params.E_J, f, warn=False), load=params.load)
            u = list(roots.u) + [math.nan] * (args.modes - len(roots.u))
            row.update({f"u{m + 1}": v for m, v in enumerate(u)})
            rows.append(row)
        _emit(args, rows, columns)
    elif args.task == "inductance":
        rng = parse_sweep(args.flux_sweep)
        ic = float(parse_quantity(args.ic, ("A",)))
        rows = []
        for flux in np.linspace(rng.start, rng.stop, rng.count):
            phi = 2 * math.pi * flux
            ic_phi = hardware.squid_critical_current(ic, phi)
            for frac in parse_number_list(args.bias_fraction):
                current = frac * ic_phi
                rows.append(dict(schema_version=SCHEMA_VERSION, flux_quanta=flux, phi_x=phi, bias_fraction=frac,
                                 current=current, ic_phi=ic_phi, l_eff=hardware.effective_inductance(current, ic, phi)))
        _emit(args, rows, ("schema_version", "flux_quanta", "phi_x", "bias_fraction", "current", "ic_phi", "l_eff"))
    else:
        q = [parse_quantity(t, ("Hz",)) for t in (args.omega_min, args.omega_max, args.omega_ref)]
        if len({x.pi_power for x in q}) == 1:
            values = [x.coefficient for x in q]  # common pi factor cancels exactly
        else:
            values = [float(x) for x in q]
        lam = hardware.detuning_range(*values)
        j = float(parse_quantity(args.hopping_freq, ("Hz",)))
        wc = float(parse_quantity(args.omega_c_ref, ("Hz",))) if args.omega_c_ref else float(q[2])
        hop = hardware.hopping_scale_check(j, wc)
        doc = dict(
            schema_version=SCHEMA_VERSION, kind="hardware_design",
            inputs=dict(omega_min=args.omega_min, omega_max=args.omega_max, omega_ref=args.omega_ref,
                        hopping=args.hopping_freq, omega_c=args.omega_c_ref or args.omega_ref),
            lambda_min=lam.lam_min, lambda_max=lam.lam_max,
            lambda_exact=[str(lam.exact[0]), str(lam.exact[1])],
            hopping_ratio=hop.ratio, hopping_in_regime=hop.in_regime,
        )
        _write(args, render_json(doc))


def cmd_verify_all(args):
    from .verification import run_all

    checks = run_all(args.seed)
    for c in checks:
        print(c.line())
    passed = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} criteria passed")
    if args.output:
        doc = dict(schema_version=SCHEMA_VERSION, kind="verification", seed=args.seed, passed=passed,
                   criteria=[dict(number=c.number, name=c.name, passed=c.passed, limit_s=c.limit,
                                  details={k: v for k, v in c.details.items() if k != "within_runtime"}) for c in checks])
        target = _resolve_output(args.output)
        try:
            write_text(render_json(doc), target)
        except OSError as exc:
            raise OutputError(f"cannot write {target}: {exc}") from exc
    return EXIT_OK if passed else EXIT_VERIFY


# ------------------------------------------------------------------ parser


def _common(p, fmt="csv"):
    p.add_argument("--omega-c", type=float, default=1.0, help="base cavity frequency (default 1)")
    p.add_argument("--hopping", type=float, default=0.01, help="hopping J in units of omega_c (default 0.01)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt)
    p.add_argument("--output", "-o", default=None, help=f"output file (default stdout; relative paths use ${OUTPUT_DIR_ENV})")


def build_parser():
    parser = argparse.ArgumentParser(prog="ccarray", allow_abbrev=False, description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)
    leaves = {}

    p = sub.add_parser("reflect", allow_abbrev=False, help="reflection/transmission sweeps")
    _common(p)
    p.add_argument("--mode", choices=("single", "double"), default="single")
    p.add_argument("--k", default="pi/2", help="comma list of wave vectors, e.g. 0.01,pi/8,pi/4,pi/2")
    p.add_argument("--lambda", dest="lam", default="0.2", help="comma list of detunings (used with --k-sweep)")
    p.add_argument("--lambda-sweep", default="-1:3:401", help="from:to:count")
    p.add_argument("--k-sweep", default=None, help="from:to:count (angle literals allowed)")
    p.add_argument("--d", type=int, default=5)
    p.set_defaults(func=cmd_reflect)
    leaves["reflect"] = p

    p = sub.add_parser("bound", allow_abbrev=False, help="bound states (single, double, band-pole)")
    _common(p, "json")
    p.add_argument("--mode", choices=("single", "double", "band-pole"), default="single")
    p.add_argument("--lambda", dest="lam", default="0.2")
    p.add_argument("--lambda0", type=float, default=0.2)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--n", type=int, default=21, help="sites for the band-pole equation")
    p.add_argument("--samples", type=int, default=2001, help="f1(omega) samples for band-pole output")
    p.add_argument("--window", type=int, default=None, help="half-width of the exported profile")
    p.set_defaults(func=cmd_bound)
    leaves["bound"] = p

    p = sub.add_parser("resonant", allow_abbrev=False, help="resonant states between two cavities")
    _common(p, "json")
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--parity", choices=("odd", "even"), default="odd")
    p.add_argument("--lambda0", type=float, default=None, help="detuning used for the validity flag")
    p.add_argument("--threshold", type=float, default=spectral.RESONANCE_THRESHOLD)
    p.add_argument("--window", type=int, default=None)
    p.set_defaults(func=cmd_resonant)
    leaves["resonant"] = p

    p = sub.add_parser("oracle", allow_abbrev=False, help="finite-lattice diagonalization or wavepacket run")
    _common(p, "json")
    p.add_argument("task", nargs="?", choices=("spectrum", "packet"), default="spectrum")
    p.add_argument("--mode", choices=("single", "double"), default="single")
    p.add_argument("--lambda", dest="lam", default="0.2")
    p.add_argument("--lambda0", type=float, default=0.2)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--boundary", choices=("periodic", "open"), default="periodic")
    p.add_argument("--energy-tol", type=float, default=1e-9)
    p.add_argument("--fidelity-tol", type=float, default=1e-6)
    p.add_argument("--k0", default="pi/2")
    p.add_argument("--width", type=float, default=20.0)
    p.add_argument("--duration", type=float, default=None, help="units of 1/J (default: one full pass)")
    p.add_argument("--samples", type=int, default=201)
    p.set_defaults(func=cmd_oracle)
    leaves["oracle"] = p

    p = sub.add_parser("hardware", allow_abbrev=False, help="circuit parameters to detunings")
    _common(p)
    p.add_argument("task", nargs="?", choices=("dispersion", "inductance", "detuning"), default="detuning")
    p.add_argument("--ej", default="100GHz", help="single-junction E_J in J, or E_J/h in Hz")
    p.add_argument("--cs", default="10fF")
    p.add_argument("--length", default="10mm")
    p.add_argument("--c-per-length", default="1.6e-10F/m")
    p.add_argument("--l-per-length", default="4.2e-7H/m")
    p.add_argument("--modes", type=int, default=3)
    p.add_argument("--flux-sweep", default="0:0.45:46", help="Phi_x/Phi_0 from:to:count")
    p.add_argument("--ic", default="1uA")
    p.add_argument("--bias-fraction", default="0,0.5,0.9", help="comma list of I / I_c(phi_x)")
    p.add_argument("--omega-min", default="2pi*4GHz")
    p.add_argument("--omega-max", default="2pi*4.8GHz")
    p.add_argument("--omega-ref", default="2pi*4GHz")
    p.add_argument("--hopping-freq", default="2pi*44MHz")
    p.add_argument("--omega-c-ref", default=None, help="cavity frequency for the J/omega_c check (default omega-ref)")
    p.set_defaults(func=cmd_hardware)
    leaves["hardware"] = p

    p = sub.add_parser("verify-all", allow_abbrev=False, help="run every acceptance criterion")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default=None, help="optional JSON report")
    p.set_defaults(func=cmd_verify_all)
    leaves["verify-all"] = p
    return parser, leaves


def _error(kind: str, exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit_code": code}) + "\n")
    return code


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def glue_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--opt -1:3:401`` into ``--opt=-1:3:401`` so argparse keeps the value."""
    out = []
    for tok in argv:
        if out and _NEGATIVE_VALUE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser, leaves = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config:
            cfg = read_config(args.config)
            leaf = leaves[args.command]
            known = {a.dest for a in leaf._actions}
            unknown = sorted(set(cfg) - known)
            if unknown:
                return _error("usage", ValueError(f"unknown config keys: {', '.join(unknown)}"), EXIT_USAGE)
            leaf.set_defaults(**cfg)
            try:
                args = parser.parse_args(argv)
            except SystemExit as exc:
                return int(exc.code or 0)
        code = args.func(args)
        return EXIT_OK if code is None else code
    except OutputError as exc:
        return _error("output", exc, EXIT_IO)
    except (spectral.RootBracketError, oracle.EigensolverError, oracle.IncompleteRunError) as exc:
        return _error("numerical", exc, EXIT_NUMERIC)
    except (ModelError, ValueError, ZeroDivisionError) as exc:
        return _error("parameter", exc, EXIT_PARAM)
    except OSError as exc:
        return _error("io", exc, EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: synth, fit, pump-design, validate."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .fitting import FitProblem, fit_populations
from .io import format_float, read_spectrum, write_spectrum
from .pumping import design_pump
from .spectrum import PopulationDistribution, add_noise, synth_spectrum
from .validate import run_checks

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _parse_triple(raw: str, what: str) -> np.ndarray:
    try:
        parts = [float(x) for x in raw.split(",")]
    except ValueError:
        raise SystemExit(f"error: cannot parse {what} {raw!r}")
    if len(parts) != 3 or min(parts) < 0 or sum(parts) <= 0:
        raise SystemExit(f"error: {what} must be three non-negative numbers")
    arr = np.array(parts)
    return arr / arr.sum()


def _load_config(args) -> RunConfig:
    if args.config:
        try:
            return load_config(args.config)
        except FileNotFoundError:
            raise SystemExit(f"error: config file not found: {args.config}")
        except ConfigError as exc:
            raise SystemExit(f"error: {exc}")
    return RunConfig()


def cmd_synth(args) -> int:
    cfg = _load_config(args)
    model = cfg.experiment_model()
    pops_arr = _parse_triple(args.pops, "--pops") if args.pops else np.full(3, 1 / 3)
    pops = PopulationDistribution(*pops_arr)
    spectrum = synth_spectrum(model, pops, cfg.scan_grid())
    out = args.out or cfg.out_path or "spectrum.csv"
    write_spectrum(spectrum, out)
    print(f"wrote {len(spectrum)} points to {out}")
    if args.noise and args.noise > 0:
        noisy = add_noise(spectrum, args.noise, args.seed)
        noisy_path = out.rsplit(".", 1)[0] + "_noisy.csv"
        write_spectrum(noisy, noisy_path)
        print(f"wrote noisy copy (sigma={args.noise:g}, seed={args.seed}) to {noisy_path}")
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _load_config(args)
    model = cfg.experiment_model()
    try:
        observed = read_spectrum(args.spectrum)
    except FileNotFoundError:
        raise SystemExit(f"error: spectrum file not found: {args.spectrum}")
    except ValueError as exc:
        raise SystemExit(f"error: {exc}")
    problem = FitProblem(
        observed=observed,
        model_template=model,
        fit_density=cfg.fit_density,
        init=cfg.fit_init_pops(),
        init_density=cfg.fit_init_density,
        max_iterations=cfg.fit_max_iterations,
        multistart=cfg.fit_multistart,
    )
    result = fit_populations(problem)
    p = result.pops.as_array()
    print("fitted ground-state populations (F=1):")
    print(f"  P(a_-1) = {100 * p[0]:6.1f} %")
    print(f"  P(a_0)  = {100 * p[1]:6.1f} %")
    print(f"  P(a_+1) = {100 * p[2]:6.1f} %")
    print(f"  N_F1        = {result.n_f1:.4e} cm^-3")
    print(f"  residual rms = {result.residual_rms:.3e}")
    print(f"  iterations   = {result.iterations}, converged = {result.converged}")
    if args.out:
        lines = [
            f"p_minus_pct = {format_float(round(100 * p[0], 1))}",
            f"p_zero_pct = {format_float(round(100 * p[1], 1))}",
            f"p_plus_pct = {format_float(round(100 * p[2], 1))}",
            f"p_minus = {format_float(p[0])}",
            f"p_zero = {format_float(p[1])}",
            f"p_plus = {format_float(p[2])}",
            f"n_f1_cm3 = {format_float(result.n_f1)}",
            f"residual_rms = {format_float(result.residual_rms)}",
            f"iterations = {result.iterations}",
            f"converged = {str(result.converged).lower()}",
            f"jacobian_condition = {format_float(result.jacobian_condition)}",
        ]
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote result to {args.out}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_pump_design(args) -> int:
    cfg = _load_config(args)
    target = _parse_triple(args.target, "--target")
    from .levels import build_level_scheme

    scheme = build_level_scheme(cfg.b_field, include_e1=True)
    model = cfg.experiment_model()
    plan = design_pump(
        target, scheme, model.coupling,
        duration_ms=cfg.pump_duration,
        beam_diameter_mm=cfg.pump_beam_diameter,
    )
    pol_name = {-1: "sigma-", 0: "pi", 1: "sigma+"}[plan.polarization]
    print("pump design:")
    print(f"  target       = {target[0]:.4f}, {target[1]:.4f}, {target[2]:.4f}")
    print(f"  polarization = {pol_name} (q={plan.polarization:+d})")
    print(f"  power        = {plan.power_mw:.4f} mW")
    print(f"  duration     = {cfg.pump_duration:g} ms")
    pred = plan.predicted
    print(f"  predicted    = {pred[0]:.4f}, {pred[1]:.4f}, {pred[2]:.4f}")
    print(f"  L1 distance  = {plan.target_distance:.4f}")
    if args.out:
        lines = [
            f"polarization = {plan.polarization}",
            f"power_mw = {format_float(plan.power_mw)}",
            f"duration_ms = {format_float(cfg.pump_duration)}",
            f"predicted_p_minus = {format_float(pred[0])}",
            f"predicted_p_zero = {format_float(pred[1])}",
            f"predicted_p_plus = {format_float(pred[2])}",
            f"target_distance = {format_float(plan.target_distance)}",
        ]
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote plan to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_checks()
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}: {r.detail}")
        failed += not r.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdsr",
        description="Multi-dark-state resonance spectra of Rb-87 D1: "
                    "synthesize, fit populations, design optical pumping.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="synthesize a transmission spectrum CSV")
    p_synth.add_argument("--config", help="config file path")
    p_synth.add_argument("--out", help="output CSV path")
    p_synth.add_argument("--pops", help="P-,P0,P+ populations (any positive weights)")
    p_synth.add_argument("--noise", type=float, default=0.0, help="also write a noisy copy")
    p_synth.add_argument("--seed", type=int, default=0, help="noise seed")
    p_synth.set_defaults(func=cmd_synth)

    p_fit = sub.add_parser("fit", help="fit populations/density to a spectrum CSV")
    p_fit.add_argument("spectrum", help="observed spectrum CSV")
    p_fit.add_argument("--config", help="config file path")
    p_fit.add_argument("--out", help="machine-readable result path")
    p_fit.set_defaults(func=cmd_fit)

    p_pump = sub.add_parser("pump-design", help="choose pump polarization and power")
    p_pump.add_argument("--target", required=True, help="target P-,P0,P+ distribution")
    p_pump.add_argument("--config", help="config file path")
    p_pump.add_argument("--out", help="machine-readable plan path")
    p_pump.set_defaults(func=cmd_pump_design)

    p_val = sub.add_parser("validate", help="run the physical invariant suite")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

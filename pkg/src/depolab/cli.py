"""Command-line entry point.

Commands: simulate, exact, couple, fit, validate.  A flat key=value config
file can pre-set any flag; explicit flags win.  DEPOLAB_SEED is the
fallback master seed.  Exit codes: 0 success, 1 usage error, 2 invariant
failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .core import Configuration, height_occupation
from .coupling import CoupledRun, DominanceViolation, polya_law, uniform_law
from .engines import GrowthModel, RngStream
from .experiments import (
    fit_logarithmic,
    fit_power_law,
    fmt,
    growth_experiment,
    points_at,
    read_frames_csv,
    write_frames_csv,
    write_metadata,
    write_summary_csv,
)
from .kernels import (
    absorption_profile,
    attachment_lower_bound_p12,
    ballistic_attachment_law,
    ballistic_upper_bound,
    diffusive_attachment_law,
    ground_probability_recursion,
    jensen_lower_bound,
    single_column_attachment,
)
from .validate import run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def load_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def dump_config_file(values: dict[str, str], path: str) -> None:
    with open(path, "w") as fh:
        for key in sorted(values):
            fh.write(f"{key} = {values[key]}\n")


_FLAG_KEYS = ("quick", "inject-fault")


def config_to_argv(values: dict[str, str]) -> list[str]:
    """Translate file entries into flags (inserted before explicit ones)."""
    argv: list[str] = []
    for key, raw in values.items():
        if key == "config":
            continue
        flag = "--" + key.replace("_", "-")
        if key.replace("_", "-") in _FLAG_KEYS:
            if raw.lower() in ("1", "true", "yes"):
                argv.append(flag)
        else:
            argv.extend([flag, raw])
    return argv


def runspec_values(args) -> dict[str, str]:
    """Flat key-value image of a parsed command, for config-file dumps."""
    out: dict[str, str] = {}
    for key, value in vars(args).items():
        if key in ("func", "command", "config") or value is None:
            continue
        name = key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                out[name] = "true"
        else:
            out[name] = str(value)
    return out


def _master_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get("DEPOLAB_SEED")
    if env is not None:
        return int(env)
    raise CliError("no master seed: pass --seed or set DEPOLAB_SEED")


def _round12(obj):
    """Recursively re-parse floats at 12 significant digits for output."""
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _parse_model(name: str) -> GrowthModel:
    if name == "quadratic-urn":
        return GrowthModel("generalized-urn", (1.0, 0.0, 1.0))
    return GrowthModel(name)


def cmd_simulate(args) -> int:
    seed = _master_seed(args)
    if args.n is None and not args.n_values:
        raise CliError("missing --n (or --n-values)")
    n_values = (
        [int(v) for v in args.n_values.split(",")] if args.n_values
        else [int(args.n)]
    )
    model = _parse_model(args.model)
    rows = growth_experiment(
        model,
        n_values,
        args.steps,
        args.realizations,
        seed,
        census_spec=args.census,
        workers=args.workers,
    )
    prefix = args.out
    write_frames_csv(rows, prefix + "_frames.csv")
    write_summary_csv(rows, prefix + "_summary.csv")
    write_metadata(
        prefix + "_meta.json", model, n_values, args.steps,
        args.realizations, seed, args.census,
    )
    print(f"wrote {prefix}_frames.csv, {prefix}_summary.csv, {prefix}_meta.json")
    return EXIT_OK


def _load_sigma(args) -> Configuration:
    if args.sigma:
        if args.n is None:
            raise CliError("--sigma requires --n")
        try:
            heights = [int(v) for v in args.sigma.split(",")]
        except ValueError as exc:
            raise CliError(f"malformed --sigma: {args.sigma!r}") from exc
        if len(heights) != int(args.n):
            raise CliError(
                f"--sigma lists {len(heights)} heights but --n is {args.n}"
            )
        return Configuration(heights)
    if args.csv:
        with open(args.csv) as fh:
            return Configuration.from_csv_row(fh.readline())
    raise CliError("provide --sigma or --csv")


def cmd_exact(args) -> int:
    c = _load_sigma(args)
    z = height_occupation(c)
    pg, _ = ground_probability_recursion(z, c.n)
    prof = absorption_profile(z, c.n)
    dlaw = diffusive_attachment_law(c)
    blaw = ballistic_attachment_law(c)
    payload = {
        "p_ground": pg,
        "profile": prof.masses.tolist(),
        "diffusive_law": dlaw.probabilities.tolist(),
        "ballistic_law": blaw.probabilities.tolist(),
        "bounds": {
            "jensen_lower": jensen_lower_bound(z, c.n),
            "p12_lower": [
                attachment_lower_bound_p12(c, i) for i in range(c.n)
            ],
            "ballistic_upper": [
                ballistic_upper_bound(c, i) for i in range(c.n)
            ],
            "single_column": [
                single_column_attachment(int(h), c.n) for h in c.heights
            ],
        },
    }
    print(json.dumps(_round12(payload), indent=2))
    return EXIT_OK


def cmd_couple(args) -> int:
    seed = _master_seed(args)
    labels = [s.strip() for s in args.chain.split(",")]
    law_map = {
        "uniform": uniform_law,
        "polya": polya_law,
        "ballistic": lambda o: ballistic_attachment_law(
            o.to_configuration()
        ).probabilities,
        "diffusive": lambda o: diffusive_attachment_law(
            o.to_configuration()
        ).probabilities,
    }
    try:
        chain = [(lab, law_map[lab]) for lab in labels]
    except KeyError as exc:
        raise CliError(f"unknown process {exc.args[0]!r}") from None
    run = CoupledRun.from_laws(chain, args.n)
    rng = RngStream(seed, 0, key=(args.n,)).generator()
    try:
        run.run(args.horizon, rng)
    except DominanceViolation as exc:
        print(f"dominance violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    steps_path = args.out + "_steps.csv"
    with open(steps_path, "w") as fh:
        fh.write("t,u,pair,hypothesis_ok,dominates\n")
        for rec in run.history:
            for k in range(len(labels) - 1):
                pair = f"{labels[k]}<={labels[k + 1]}"
                fh.write(
                    f"{rec.t},{fmt(rec.u)},{pair},"
                    f"{int(rec.hypothesis_ok[k])},{int(rec.dominates[k])}\n"
                )
    states_path = args.out + "_states.csv"
    with open(states_path, "w") as fh:
        fh.write("label,configuration\n")
        for proc in run.processes:
            row = proc.state.to_configuration().to_csv_row()
            fh.write(f'{proc.label},"{row}"\n')
    print(f"wrote {steps_path}, {states_path}")
    return EXIT_OK


def cmd_fit(args) -> int:
    rows = read_frames_csv(args.csv)
    points = points_at(rows, args.at, model=args.model or None)
    if len(points) < 3:
        raise CliError(f"only {len(points)} usable points at {args.at!r}")
    fit = fit_power_law(points) if args.kind == "power" else fit_logarithmic(points)
    payload = {
        "kind": fit.kind,
        "amplitude": fit.amplitude,
        "exponent_or_slope": fit.exponent_or_slope,
        "r_squared": fit.r_squared,
        "points": [{"n": n, "mean_max_height": y} for n, y in points],
    }
    print(json.dumps(_round12(payload), indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_suite(
        quick=args.quick, seed=args.seed if args.seed is not None else 20260825,
        inject_fault=args.inject_fault,
    )
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: {detail}")
        failed += 0 if ok else 1
    return EXIT_OK if failed == 0 else EXIT_INVARIANT


def build_parser() -> _Parser:
    parser = _Parser(prog="depolab")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a growth experiment grid")
    sim.add_argument("--config", default=None)
    sim.add_argument("--model", default="ballistic")
    sim.add_argument("--n", type=int, default=None)
    sim.add_argument("--n-values", default="")
    sim.add_argument("--steps", default="lin:1",
                     help="schedule expressions, e.g. 'crit:1,crit:2,lin:1'")
    sim.add_argument("--realizations", type=int, default=1)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--census", default="gamma-log:1")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out", default="depolab_run")
    sim.set_defaults(func=cmd_simulate)

    exa = sub.add_parser("exact", help="exact kernels for one configuration")
    exa.add_argument("--config", default=None)
    exa.add_argument("--n", type=int, default=None)
    exa.add_argument("--sigma", default="")
    exa.add_argument("--csv", default="")
    exa.set_defaults(func=cmd_exact)

    cou = sub.add_parser("couple", help="coupled dominance run")
    cou.add_argument("--config", default=None)
    cou.add_argument("--chain", default="uniform,polya,ballistic")
    cou.add_argument("--n", type=int, default=50)
    cou.add_argument("--horizon", type=int, default=200)
    cou.add_argument("--seed", type=int, default=None)
    cou.add_argument("--out", default="depolab_couple")
    cou.set_defaults(func=cmd_couple)

    fit = sub.add_parser("fit", help="regression fit on a frames CSV")
    fit.add_argument("--config", default=None)
    fit.add_argument("--csv", required=True)
    fit.add_argument("--kind", choices=("power", "log"), default="power")
    fit.add_argument("--at", default="lin:1")
    fit.add_argument("--model", default="")
    fit.set_defaults(func=cmd_fit)

    val = sub.add_parser("validate", help="run the invariant suite")
    val.add_argument("--config", default=None)
    val.add_argument("--quick", action="store_true")
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--inject-fault", action="store_true",
                     help="corrupt one check to exercise the harness")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            injected = config_to_argv(load_config_file(args.config))
            # file values first, explicit flags after: flags win
            args = parser.parse_args([argv[0]] + injected + argv[1:])
        code = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())

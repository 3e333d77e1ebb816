"""Command-line entry point: ``precipmix {extract,fit,verify,simulate}``.

Exit codes: 0 success, 2 input/parse error, 3 numerical non-convergence or
degenerate fit, 4 identity verification failure.

Seeds: ``simulate`` hands ``--seed`` to the sampler unchanged; ``fit`` spawns
one child stream per bootstrap replicate from ``SeedSequence(--seed)``.
"""
import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .distributions import (
    GammaParams,
    GleserMixingParams,
    NegBinParams,
    ParetoGPDParams,
    ParetoLomaxParams,
    sample_gamma,
    sample_gpd,
    sample_lomax,
    sample_negbin,
)
from .errors import DegenerateSampleError, ParameterError, ParseError, PrecipMixError, PreconditionError
from .fitting import fit_gamma, fit_gpd_volumes, fit_negbin_durations
from .gof import chi_square_discrete, histogram_report, ks_continuous
from .ingest import IngestConfig, extract_spells, markov_order_test, parse_csv
from .mixtures import (
    IDENTITIES,
    default_suite,
    gleser_table,
    sample_gleser_gamma,
    sample_gleser_mixing,
    sample_lomax_compound,
    sample_negbin_compound,
)
from .quadrature import QuadratureSpec

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class InputError(Exception):
    pass


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _column_csv(name, values):
    lines = [name]
    for v in values:
        lines.append(str(int(v)) if isinstance(v, (int, np.integer)) else repr(float(v)))
    return "\n".join(lines) + "\n"


def _read_column(path):
    if not os.path.exists(path):
        raise InputError(f"input file not found: {path}")
    values = []
    problems = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            cell = line.strip().split(",")[0].strip()
            if not cell:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                if lineno == 1:
                    continue  # header
                problems.append((lineno, f"not a number: {cell!r}"))
    if problems:
        raise ParseError(problems)
    return np.array(values)


def _out_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


# ---------------------------------------------------------------------------


def cmd_extract(args):
    if not os.path.exists(args.input):
        raise InputError(f"input file not found: {args.input}")
    series = parse_csv(args.input, IngestConfig(missing_sentinel=args.missing_sentinel))
    spells = extract_spells(series, args.wet_threshold)
    out = _out_dir(args.output_dir)
    _write_atomic(os.path.join(out, "wet_durations.csv"), _column_csv("wet_duration", spells.wet_durations))
    _write_atomic(os.path.join(out, "dry_durations.csv"), _column_csv("dry_duration", spells.dry_durations))
    _write_atomic(os.path.join(out, "wet_totals.csv"), _column_csv("wet_total_mm", spells.wet_totals))
    _write_atomic(os.path.join(out, "wet_day_depths.csv"), _column_csv("depth_mm", spells.wet_day_depths))
    _write_atomic(os.path.join(out, "spells.json"), spells.to_json() + "\n")
    summary = spells.summary()
    if args.markov_order > 0:
        try:
            summary["markov"] = markov_order_test(series, args.wet_threshold, args.markov_order).to_dict()
        except PreconditionError as exc:
            summary["markov"] = {"skipped": str(exc)}
    _write_atomic(os.path.join(out, "summary.json"), _dump(summary))
    print(f"{spells.wet_durations.size} wet spells, {spells.dry_durations.size} dry spells, "
          f"{spells.discarded_spells} discarded -> {out}")
    return EXIT_OK


def _histogram_files(out, hist):
    _write_atomic(os.path.join(out, "histogram.csv"), hist.to_csv())
    if hist.kind == "continuous":
        _write_atomic(os.path.join(out, "model_curve.csv"), hist.curve_csv())


def cmd_fit(args):
    data = _read_column(args.input)
    out = _out_dir(args.output_dir)
    fit_path = os.path.join(out, "fit.json")
    try:
        if args.family == "negbin":
            if np.any(data != np.floor(data)):
                raise InputError("duration file must contain integers")
            report = fit_negbin_durations(data.astype(np.int64))
        elif args.family == "gpd":
            report = fit_gpd_volumes(data, threshold=args.wet_threshold)
        else:
            report = fit_gamma(data)
    except DegenerateSampleError as exc:
        _write_atomic(fit_path, _dump({"family": args.family, "converged": False, "n": int(data.size),
                                       "error": str(exc)}))
        print(f"degenerate sample: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PreconditionError as exc:
        raise InputError(str(exc)) from exc
    _write_atomic(fit_path, _dump(report.to_dict()))

    params = report.params
    if args.family == "negbin":
        try:
            gof = chi_square_discrete(data.astype(np.int64), params)
            gof_doc = gof.to_dict()
        except PreconditionError as exc:
            gof_doc = {"test": "chi-square", "error": str(exc)}
    else:
        if args.bootstrap_reps > 0 and args.seed is None:
            raise InputError("--seed is required for the bootstrap p-value (or pass --bootstrap-reps 0)")
        try:
            gof_doc = ks_continuous(data, params, args.bootstrap_reps, args.seed).to_dict()
        except PreconditionError as exc:
            gof_doc = {"test": "ks-bootstrap", "error": str(exc)}
    _write_atomic(os.path.join(out, "gof.json"), _dump(gof_doc))
    _histogram_files(out, histogram_report(data, params))
    est = ", ".join(f"{k}={v:.6g}" for k, v in report.estimates.items())
    print(f"{args.family}: {est} (converged={report.converged}) -> {out}")
    return EXIT_OK if report.converged else EXIT_NUMERIC


def cmd_verify(args):
    quad = QuadratureSpec(abs_tol=args.quad_abs_tol, rel_tol=args.quad_rel_tol,
                          max_subdivisions=args.max_subdivisions)
    tolerances = None
    if args.report_tol is not None:
        tolerances = {name: args.report_tol for name in IDENTITIES}
    reports = default_suite(args.identity, quad, tolerances)
    doc = {
        "identity": args.identity,
        "quadrature": {"abs_tol": quad.abs_tol, "rel_tol": quad.rel_tol,
                       "max_subdivisions": quad.max_subdivisions},
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    out = _out_dir(args.output_dir)
    _write_atomic(os.path.join(out, "identity_reports.json"), _dump(doc))
    failed = [r for r in reports if not r.passed]
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.identity} {json.dumps(r.parameters, sort_keys=True)} "
              f"max_rel_error={r.max_rel_error:.3g} tol={r.tolerance:g}")
    for r in failed:
        first = r.failures[0] if r.failures else {}
        print(f"  worst point {r.worst_point}; first failure {json.dumps(first, sort_keys=True)}",
              file=sys.stderr)
    print(f"{len(reports) - len(failed)}/{len(reports)} identity reports passed")
    return EXIT_OK if not failed else EXIT_VERIFY


_FAMILY_PARAMS = {
    "negbin": (NegBinParams, ("r", "p")),
    "gamma": (GammaParams, ("shape", "rate")),
    "gpd": (ParetoGPDParams, ("xi", "sigma", "mu")),
    "lomax": (ParetoLomaxParams, ("s", "mu")),
    "gleser-mixing": (GleserMixingParams, ("r", "theta")),
    "gleser-gamma": (GleserMixingParams, ("r", "theta")),
}


def _parse_params(family, pairs):
    cls, names = _FAMILY_PARAMS[family]
    values = {}
    for item in pairs or []:
        if "=" not in item:
            raise InputError(f"--param expects name=value, got {item!r}")
        key, val = item.split("=", 1)
        key = key.strip()
        if key not in names:
            raise InputError(f"unknown parameter {key!r} for {family}; expected {names}")
        try:
            values[key] = float(val)
        except ValueError as exc:
            raise InputError(f"parameter {key} is not a number: {val!r}") from exc
    required = [n for n in names if not (family == "gpd" and n == "mu")]
    missing = [n for n in required if n not in values]
    if missing:
        raise InputError(f"missing parameter(s) for {family}: {missing}")
    try:
        return cls(**values)
    except ParameterError as exc:
        raise InputError(str(exc)) from exc


def cmd_simulate(args):
    if args.n < 1:
        raise InputError(f"--n must be >= 1, got {args.n}")
    if args.seed is None:
        raise InputError("--seed is required for simulate")
    params = _parse_params(args.family, args.param)
    method = args.method
    meta = {"family": args.family, "method": method, "n": args.n, "seed": args.seed,
            "parameters": params.to_dict(), "shift": args.shift}
    if args.family == "negbin":
        sampler = sample_negbin_compound if method == "compound" else sample_negbin
        sample = sampler(params, args.n, args.seed) + args.shift
    elif args.family == "lomax":
        sampler = sample_lomax_compound if method == "compound" else sample_lomax
        sample = sampler(params, args.n, args.seed)
    elif args.family in ("gleser-mixing", "gleser-gamma"):
        table = gleser_table(params)
        meta["truncation_mass"] = table.truncation_mass
        meta["upper_rate"] = table.upper
        fn = sample_gleser_mixing if args.family == "gleser-mixing" else sample_gleser_gamma
        sample = fn(params, args.n, args.seed, table=table)
        if args.family == "gleser-gamma":
            method = "compound"
    else:
        if method == "compound":
            raise InputError(f"no compound sampler for {args.family}")
        sample = (sample_gamma if args.family == "gamma" else sample_gpd)(params, args.n, args.seed)
    meta["method"] = method
    if args.shift and args.family != "negbin":
        raise InputError("--shift applies to negbin only")
    out = _out_dir(args.output_dir)
    _write_atomic(os.path.join(out, "sample.csv"), _column_csv("value", sample))
    _write_atomic(os.path.join(out, "metadata.json"), _dump(meta))
    print(f"{args.n} {args.family} draws ({method}) -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="precipmix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract wet/dry spells from a daily CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--wet-threshold", type=float, default=0.0)
    p.add_argument("--missing-sentinel", type=float, default=None)
    p.add_argument("--markov-order", type=int, default=2,
                   help="run order tests m vs m+1 for m < this (0 disables)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("fit", help="fit a family and write fit/gof/histogram files")
    p.add_argument("--input", required=True, help="one value per row (header optional)")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--family", choices=("negbin", "gpd", "gamma"), required=True)
    p.add_argument("--wet-threshold", type=float, default=0.0, help="GPD location")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--bootstrap-reps", type=int, default=200)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="check mixture identities by quadrature")
    p.add_argument("--identity", choices=IDENTITIES + ("all",), default="all")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--quad-rel-tol", type=float, default=1e-10)
    p.add_argument("--quad-abs-tol", type=float, default=1e-12)
    p.add_argument("--max-subdivisions", type=int, default=2000)
    p.add_argument("--report-tol", type=float, default=None,
                   help="override every identity's pass tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="draw a sample with a direct or compound sampler")
    p.add_argument("--family", choices=tuple(_FAMILY_PARAMS), required=True)
    p.add_argument("--method", choices=("direct", "compound"), default="direct")
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--shift", type=int, default=0, help="add to NB draws (1 gives durations)")
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, PrecipMixError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

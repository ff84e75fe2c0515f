"""Command-line entry point: ``nilsym --catalog NAME`` or ``nilsym --input FILE``."""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

from nilsym import __version__
from nilsym.errors import NilsymError, TheoremViolationError
from nilsym.flows import build_analysis_flow, build_catalog_sweep, sweep_results
from nilsym.utils import catalog, config
from nilsym.utils.documents import SCHEMA, analysis_report, write_report

logger = logging.getLogger("nilsym")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_AMBIGUOUS = 3
EXIT_INCONSISTENT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilsym",
        description="Index of symmetry of 2-step nilpotent Lie groups built from orthogonal representations.",
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--catalog", metavar="NAME", help="catalog entry, or 'all' for every entry")
    source.add_argument("--input", metavar="FILE", help="JSON input document")
    source.add_argument("--list", action="store_true", help="list catalog entries and exit")
    parser.add_argument("--params", nargs="*", default=[], metavar="K=V", help="catalog parameters")
    parser.add_argument("--tol", type=float, help="rank tolerance (default 1e-9 or NILSYM_TOL)")
    parser.add_argument("--seed", type=int, help="seed for the irreducible decomposition (default 0)")
    parser.add_argument("--json", metavar="PATH", help="write the full report to PATH")
    parser.add_argument("--quotient", action="store_true", help="also analyze the quotient input")
    parser.add_argument("--jobs", type=int, default=1, help="parallel runs for --catalog all")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true", help="print errors only")
    verbosity.add_argument("--verbose", action="store_true", help="log stage progress")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _settings(args: argparse.Namespace) -> Dict[str, Any]:
    config.configure(tol=args.tol, seed=args.seed)
    return {"tol": config.get("tol"), "theorem_tol": config.get("theorem_tol"), "seed": config.get("seed")}


def _report(values: Dict[str, Any], params: Dict[str, Any], source: Dict[str, Any]) -> Dict[str, Any]:
    report = analysis_report(values["model"], values["symmetry"], params, source)
    if "quotient/symmetry" in values:
        report["quotient_analysis"] = analysis_report(values["quotient/model"], values["quotient/symmetry"])
    return report


def _summary(label: str, report: Dict[str, Any]) -> str:
    verdict = "verified" if report["theorem"]["verified"] else "FAILED"
    line = (
        f"{label}: dim n = {report['dims']['n']}, dim k = {report['dims']['k']}, "
        f"factors {[f['dim'] for f in report['factors']]}, index of symmetry {report['index_of_symmetry']} "
        f"(co-index {report['co_index']}), theorem {verdict}"
    )
    if "quotient" in report:
        q = report["quotient"]
        line += f"; quotient {q['kind']} of dim {q['dim']}, leaf R^{report['leaf']['dim']}"
    if "quotient_analysis" in report:
        line += f"; quotient index {report['quotient_analysis']['index_of_symmetry']}"
    return line


def _label(name: str, params: Dict[str, Any]) -> str:
    if not params:
        return name
    shown = ",".join(f"{k}={v}" for k, v in sorted(params.items()))
    return f"{name}({shown})"


def run_analyze(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    """Run the analysis the arguments describe; returns (exit code, report)."""
    shared = {"settings": _settings(args)}
    if args.catalog == "all":
        entries = catalog.sweep_entries()
        sweep = build_catalog_sweep(entries, parallel=args.jobs > 1, max_workers=args.jobs, quotient=args.quotient)
        sweep.run(shared)
        runs: List[Dict[str, Any]] = []
        for (name, params), (_, values) in zip(entries, sweep_results(shared)):
            runs.append(_report(values, params, {"catalog": name}))
            runs[-1]["label"] = _label(name, params)
        report = {"schema": SCHEMA, "runs": runs}
        reports = runs
    else:
        if args.catalog:
            params = catalog.parse_params(args.catalog, args.params)
            shared["source"] = {"catalog": args.catalog, "params": params}
            flow, source, label = build_analysis_flow("catalog", args.quotient), {"catalog": args.catalog}, _label(args.catalog, params)
        else:
            params = {}
            shared["input_path"] = args.input
            flow, source, label = build_analysis_flow("document", args.quotient), {"input": args.input}, args.input
        flow.run(shared)
        report = _report(shared, params, source)
        report["label"] = label
        reports = [report]
    if args.json:
        write_report(report, args.json)
    failed = [r for r in reports if not r["theorem"]["verified"]]
    for r in reports:
        if not args.quiet:
            print(_summary(r["label"], r))
    if failed:
        raise TheoremViolationError(f"check failed for {', '.join(r['label'] for r in failed)}")
    return EXIT_OK, report


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.ERROR if args.quiet else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.list:
        for name in catalog.catalog_names():
            print(f"{name}: {catalog.describe(name)}")
        return EXIT_OK
    if not args.catalog and not args.input:
        build_parser().print_usage(sys.stderr)
        print("nilsym: error: one of --catalog, --input or --list is required", file=sys.stderr)
        return EXIT_INPUT
    if args.params and not args.catalog:
        print("nilsym: error: --params needs --catalog", file=sys.stderr)
        return EXIT_INPUT
    if args.params and args.catalog == "all":
        print("nilsym: error: --catalog all runs the fixed sweep parameters; --params is not accepted", file=sys.stderr)
        return EXIT_INPUT
    try:
        code, _ = run_analyze(args)
    except NilsymError as e:
        print(f"nilsym: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"nilsym: invalid setting: {e}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        config.reset()
    return code


if __name__ == "__main__":
    sys.exit(main())

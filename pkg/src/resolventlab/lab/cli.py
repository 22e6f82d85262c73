"""Command-line driver.

Subcommands: classify, sweep, certify, fit, report.  Exit codes:
0 success, 2 input/infrastructure error, 3 certificate failed,
4 certificate void (wall contamination).
"""

import argparse
import sys

from ..errors import IntegrationError, ResolventLabError
from .config import load_config, parse_h
from . import runner

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CERT_FAILED = 3
EXIT_CERT_VOID = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="resolventlab",
        description="Resolvent-norm scaling experiments for 1D semiclassical "
                    "Schrodinger operators")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("classify", True), ("sweep", True),
                               ("certify", True), ("fit", True), ("report", False)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config, help="experiment config file")
        p.add_argument("--out", required=True, help="run directory")
        if name == "certify":
            p.add_argument("--h", required=True,
                           help="semiclassical parameter, e.g. 1/64")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "report":
            runner.emit_report(args.out)
            print(f"report written to {args.out}")
            return EXIT_OK

        config = load_config(args.config)

        if args.command == "classify":
            report = runner.run_classify(config, args.out)
            gamma = f", gamma = {report.gamma:.6g}" if report.gamma is not None else ""
            print(f"classification: {report.classification.value} "
                  f"({len(report.trapped_samples)} trapped samples{gamma})")
            return EXIT_OK

        if args.command == "sweep":
            results = runner.run_sweep(config, args.out)
            warnings = sum(1 for r in results if r.lower_bound_only)
            for h, res in zip(config.h_list, results):
                flag = " (lower bound only)" if res.lower_bound_only else ""
                print(f"h = {h:.8g}: sup norm = {res.kofh.sup_norm:.6g}, "
                      f"K = {res.kofh.K:.6g}{flag}")
            if warnings:
                print(f"warning: {warnings} sweep(s) contain unconverged samples")
            return EXIT_OK

        if args.command == "certify":
            cert = runner.run_certificate(config, args.out, parse_h(args.h))
            print(f"min observable = {cert.min_observable:.6g}, "
                  f"kato integral = {cert.kato_integral:.6g}, "
                  f"K = {cert.K_measured:.6g}, "
                  f"lower bound = {cert.paper_lower_bound:.6g}")
            if not cert.valid:
                print(f"certificate VOID: {cert.hint}")
                return EXIT_CERT_VOID
            if cert.kato_ok and cert.bound_ok:
                print("certificate OK (kato_ok and bound_ok)")
                return EXIT_OK
            print(f"certificate FAILED (kato_ok={cert.kato_ok}, "
                  f"bound_ok={cert.bound_ok})")
            return EXIT_CERT_FAILED

        if args.command == "fit":
            result = runner.run_fit(config, args.out)
            amb = " (ambiguous)" if result.ambiguous else ""
            print(f"selected model: {result.selected.model.value}{amb}")
            return EXIT_OK
    except (ResolventLabError, IntegrationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

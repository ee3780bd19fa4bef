"""Command-line front end: ``qaep {analyze,sweep,decompose,compress,selftest}``.

Data goes to files under ``--out``; logs go to standard error.

Exit codes: 0 success, 1 usage, 2 numerical/capacity, 3 selftest failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import linalg
from .aep import aep_convergence_report, report_csv, report_row
from .codec import build_codec, ensemble_fidelity
from .ergodic import decompose_report
from .errors import CapacityError, ModelError, NumericalError, QaepError, UnsupportedModelError
from .modelio import load_model, model_hash
from .selftest import run_selftest
from .states import block_density, mean_entropy

log = logging.getLogger("qaep")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_SELFTEST = 0, 1, 2, 3
DEFAULT_EPS = (0.1, 0.01)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(name):
    def parse(text):
        try:
            x = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not x > 0:
            raise argparse.ArgumentTypeError(f"{name} must be > 0, got {text}")
        return x

    return parse


def _epsilon(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--eps must be a number, got {text!r}")
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError(f"--eps must lie in (0, 1), got {text}")
    return x


def _positive_int(name):
    def parse(text):
        try:
            x = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if x < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {text}")
        return x

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--format", choices=("json", "csv", "both"), default="json")
    common.add_argument("--max-dim", type=_positive_int("--max-dim"), default=None,
                        help=f"largest dense block dimension (default {linalg.MAX_DIM})")
    common.add_argument("-v", "--verbose", action="store_true")

    with_model = argparse.ArgumentParser(add_help=False, parents=[common])
    with_model.add_argument("--model", required=True, help="model definition JSON file")

    p = _Parser(prog="qaep", description="Typical subspaces and entropy rates of quantum spin chain sources.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[with_model], help="AEP quantities for one block length")
    a.add_argument("--n", type=_positive_int("--n"), required=True)
    a.add_argument("--eps", type=_epsilon, action="append")
    a.add_argument("--delta", type=_positive_float("--delta"), default=0.1)

    s = sub.add_parser("sweep", parents=[with_model], help="AEP convergence table for n = 1..n_max")
    s.add_argument("--n-max", type=_positive_int("--n-max"), required=True)
    s.add_argument("--eps", type=_epsilon, action="append")
    s.add_argument("--delta", type=_positive_float("--delta"), default=0.1)

    d = sub.add_parser("decompose", parents=[with_model], help="sublattice-ergodic decompositions for l = 1..l_max")
    d.add_argument("--l-max", type=_positive_int("--l-max"), required=True)
    d.add_argument("--eta", type=_positive_float("--eta"), default=0.05)

    c = sub.add_parser("compress", parents=[with_model], help="typical-subspace codec and its ensemble fidelity")
    c.add_argument("--n", type=_positive_int("--n"), required=True)
    c.add_argument("--delta", type=_positive_float("--delta"), default=0.1)
    c.add_argument("--trials", type=_positive_int("--trials"), default=10_000)
    c.add_argument("--seed", type=int, default=0)

    sub.add_parser("selftest", parents=[common], help="run the oracle suites")
    return p


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    log.info("wrote %s", path)


def _epsilons(args):
    return tuple(args.eps) if args.eps else DEFAULT_EPS


def _analyze(args, model, out):
    block = block_density(model, args.n)
    s = mean_entropy(model)
    doc = {"model_hash": model_hash(model), "s": s, "delta": args.delta,
           "row": report_row(block, s, _epsilons(args), args.delta)}
    if args.format in ("json", "both"):
        _write(out, "analyze.json", _dumps(doc))
    if args.format in ("csv", "both"):
        _write(out, "analyze.csv", report_csv({"rows": [doc["row"]]}))
    return EXIT_OK


def _sweep(args, model, out):
    report = aep_convergence_report(model, args.n_max, _epsilons(args), args.delta, model_hash(model))
    if args.format in ("json", "both"):
        _write(out, "sweep.json", _dumps(report))
    if args.format in ("csv", "both"):
        _write(out, "sweep.csv", report_csv(report))
    return EXIT_OK


def _decompose(args, model, out):
    report = {"model_hash": model_hash(model), **decompose_report(model, args.l_max, args.eta)}
    if args.format in ("json", "both"):
        _write(out, "decompose.json", _dumps(report))
    if args.format in ("csv", "both"):
        lines = ["l,k,divides_l,component,entropy_rate_Gl,s_finite_box,equal_entropy,atypical_fraction"]
        for r in report["reports"]:
            for c in r["components"]:
                lines.append(
                    f"{r['l']},{r['k']},{int(r['divides_l'])},{c['index']},{c['entropy_rate_Gl']!r},"
                    f"{c['s_finite_box']!r},{int(r['equal_entropy'])},{r['atypical_fraction']!r}"
                )
        _write(out, "decompose.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def _compress(args, model, out):
    codec = build_codec(model, args.n, args.delta)
    report = ensemble_fidelity(codec, args.trials, args.seed)
    if args.format in ("json", "both"):
        _write(out, "compress.json", _dumps(report))
    if args.format in ("csv", "both"):
        keys = sorted(report)
        _write(out, "compress.csv", ",".join(keys) + "\n" + ",".join(repr(report[k]) for k in keys) + "\n")
    return EXIT_OK


def _selftest(args, out):
    result = run_selftest()
    for c in result["checks"]:
        print(f"{'PASS' if c['ok'] else 'FAIL'} {c['name']}: {c['detail']}", file=sys.stderr)
    _write(out, "selftest.json", _dumps(result))
    return EXIT_OK if result["passed"] else EXIT_SELFTEST


COMMANDS = {"analyze": _analyze, "sweep": _sweep, "decompose": _decompose, "compress": _compress}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    out = Path(args.out)
    saved = linalg.MAX_DIM
    if args.max_dim is not None:
        linalg.MAX_DIM = args.max_dim
    try:
        if args.command == "selftest":
            return _selftest(args, out)
        model = load_model(args.model)
        return COMMANDS[args.command](args, model, out)
    except (ModelError, UnsupportedModelError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (CapacityError, NumericalError) as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except QaepError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    finally:
        linalg.MAX_DIM = saved


if __name__ == "__main__":
    sys.exit(main())

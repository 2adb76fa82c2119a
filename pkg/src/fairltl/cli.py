"""``fairltl`` command line.

Exit codes for ``check``: 0 holds, 1 violated, 2 error, 3 the formula is
not a fairness property (refuted by the screen).
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import bench
from .buchi import TranslationCapExceeded
from .checker import (
    check_fair, check_under_fairness, classic_mc, format_lasso, format_trace,
)
from .kripke import ModelError, load_model
from .ltl import (
    FairnessScreen, Fragment, Implies, LTLSyntaxError, classify_fragment, is_fairness_bounded,
    parse_pnf, to_pnf,
)
from .transform import (
    DEFAULT_SIZE_CAP, SizeCapExceeded, classify_fast, fair_normal_form, flatten_fg,
)

EXIT_HOLDS, EXIT_VIOLATED, EXIT_ERROR, EXIT_NOT_FAIR = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fairltl", description="LTL model checking with fairness normal forms")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="model check a formula")
    c.add_argument("--model", required=True, help="model file")
    c.add_argument("--formula", required=True)
    c.add_argument("--fairness", help="fairness assumption; --formula may then be any LTL")
    c.add_argument("--engine", choices=("fair", "classic", "auto"), default="auto")
    c.add_argument("--witness", action="store_true", help="print the counterexample lasso")
    c.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP)
    c.add_argument("--seed", type=int, default=0, help="seed of the fairness screen")
    c.add_argument("--screen-samples", type=int, default=200,
                   help="lassos sampled by the fairness screen (0 skips it)")

    t = sub.add_parser("transform", help="print the fair normal form of a formula")
    t.add_argument("--formula", required=True)
    t.add_argument("--general", action="store_true",
                   help="use the full-LTL normal form even for LTL(F,G) input")
    t.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP)

    k = sub.add_parser("classify", help="report fragment, growth class and fairness screen")
    k.add_argument("--formula", required=True)
    k.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="run benchmark cases and write CSV")
    b.add_argument("--suite", choices=("pd", "bs"), required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--patterns", default="p1,p2,p3,p4")
    b.add_argument("--engines", default="fair,classic")
    b.add_argument("--out", default="-", help="CSV path ('-' for stdout)")
    b.add_argument("--budget-ms", type=int, default=bench.DEFAULT_BUDGET_MS)
    return p


def _screen(phi, seed: int, samples: int) -> Optional[str]:
    """Error text when ``phi`` is refuted as a fairness property."""
    if samples <= 0:
        print("warning: fairness screen skipped; formula trusted as a fairness property",
              file=sys.stderr)
        return None
    res = is_fairness_bounded(phi, samples=samples, seed=seed)
    if res.status == FairnessScreen.CONFIRMED_NOT:
        w = res.counterexample
        return f"not a fairness property (refuted on lasso {w})"
    return None


def _cmd_check(args) -> int:
    K = load_model(args.model)
    phi = parse_pnf(args.formula)
    if args.fairness is not None:
        fair = parse_pnf(args.fairness)
        if args.engine == "classic":
            v = classic_mc(to_pnf(Implies(fair, phi)), K)
        else:
            v = check_under_fairness(phi, fair, K, size_cap=args.size_cap,
                                     fallback=args.engine == "auto")
    elif args.engine == "classic":
        v = classic_mc(phi, K)
    else:
        err = _screen(phi, args.seed, args.screen_samples)
        if err:
            print(f"error: {err}", file=sys.stderr)
            return EXIT_NOT_FAIR
        v = check_fair(phi, K, size_cap=args.size_cap, fallback=args.engine == "auto")
    if v.stats.fallback:
        print(f"note: fell back to the classic engine ({v.stats.fallback})", file=sys.stderr)
    print("holds" if v.holds else "violated")
    if not v.holds and args.witness and v.witness is not None:
        print(format_lasso(K, v.witness))
        print(format_trace(K, v.witness))
    return EXIT_HOLDS if v.holds else EXIT_VIOLATED


def _cmd_transform(args) -> int:
    phi = parse_pnf(args.formula)
    if not args.general and classify_fragment(phi) in (Fragment.PROPOSITIONAL, Fragment.LTL_FG):
        print(flatten_fg(phi, args.size_cap))
    else:
        print(fair_normal_form(phi, args.size_cap))
    return 0


def _cmd_classify(args) -> int:
    phi = parse_pnf(args.formula)
    screen = is_fairness_bounded(phi, seed=args.seed)
    print(f"fragment={classify_fragment(phi).value} fast={classify_fast(phi).value} "
          f"fairness={screen.status.value}")
    return 0


def _cmd_bench(args) -> int:
    family = args.suite.upper()
    patterns = [x.strip() for x in args.patterns.split(",") if x.strip()]
    engines = [x.strip() for x in args.engines.split(",") if x.strip()]
    cases = bench.make_cases([family], [args.n], patterns, engines)
    if args.out == "-":
        bench.run_suite(cases, args.budget_ms, sys.stdout)
    else:
        bench.run_suite(cases, args.budget_ms, args.out)
    return 0


_COMMANDS = {"check": _cmd_check, "transform": _cmd_transform,
             "classify": _cmd_classify, "bench": _cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except LTLSyntaxError as exc:
        print(f"error: formula syntax: {exc}", file=sys.stderr)
    except ModelError as exc:
        print(f"error: model: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (SizeCapExceeded, TranslationCapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

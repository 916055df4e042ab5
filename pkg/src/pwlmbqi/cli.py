"""Command line: ``pwlmbqi solve|fragment|bench|diff``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .errors import SmtParseError, SolverError
from .fragment import write_fragments
from .mbqi import MODES, SAT, Config, solve
from .smtlib import parse_script, print_model

EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE, EXIT_MISMATCH = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {s}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, default="smart")
    common.add_argument("--max-iters", type=_positive(int), default=500)
    common.add_argument("--timeout", type=_positive(float), default=30.0)
    common.add_argument("--greedy-stop-on-first-unsat", action=argparse.BooleanOptionalAction,
                        default=True, help="recursive predicate fitting stops a region at the first misfit")
    common.add_argument("--verify-models", action=argparse.BooleanOptionalAction, default=True)
    common.add_argument("--external-solver", metavar="CMD",
                        help=f"external SMT solver command (fallback: ${harness.ENV_EXTERNAL})")
    common.add_argument("--jobs", type=_positive(int), default=None)
    common.add_argument("--out", metavar="PATH")

    p = _Parser(prog="pwlmbqi", description="MBQI with piecewise-linear model learning")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="solve one SMT-LIB file")
    s.add_argument("path")
    s.add_argument("--model", action="store_true", help="print the model on sat")

    f = sub.add_parser("fragment", parents=[common], help="write k-function fragments")
    f.add_argument("path")
    f.add_argument("-k", type=_positive(int), default=2)
    f.add_argument("--cap", type=_positive(int), default=None)

    b = sub.add_parser("bench", parents=[common], help="run a directory of problems")
    b.add_argument("directory")
    b.add_argument("--modes", default=",".join(MODES))

    d = sub.add_parser("diff", parents=[common], help="compare against an external solver")
    d.add_argument("path")
    return p


def _config(a) -> Config:
    return Config(mode=a.mode, max_iters=a.max_iters, timeout=a.timeout,
                  external_solver=a.external_solver, verify_models=a.verify_models,
                  stop_on_first_unsat=a.greedy_stop_on_first_unsat)


def _load(path):
    return parse_script(Path(path).read_text())


def cmd_solve(a, out) -> int:
    r = solve(_load(a.path), _config(a))
    print(harness.verdict_word(r.verdict), file=out)
    if r.verdict == SAT and a.model:
        print(print_model(r.model), file=out)
    return EXIT_OK if r.verdict in ("sat", "unsat") else EXIT_UNKNOWN


def cmd_fragment(a, out) -> int:
    path = Path(a.path)
    out_dir = Path(a.out) if a.out else path.parent / "fragments"
    base = path.name[:-5] if path.name.endswith(".smt2") else path.name
    written = write_fragments(_load(path), a.k, out_dir, base, a.cap)
    for p in written:
        print(p, file=out)
    print(f"wrote {len(written)} fragment(s) to {out_dir}", file=out)
    if not written:
        print("warning: no fragment produced", file=sys.stderr)
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_bench(a, out) -> int:
    modes = [m.strip() for m in a.modes.split(",") if m.strip()]
    bad = [m for m in modes if m not in MODES]
    if bad:
        print(f"unknown mode(s): {bad}", file=sys.stderr)
        return EXIT_USAGE
    if not Path(a.directory).is_dir():
        print(f"not a directory: {a.directory}", file=sys.stderr)
        return EXIT_USAGE
    records = harness.bench(a.directory, _config(a), modes, a.jobs)
    csv_text = harness.records_csv(records)
    table = harness.markdown_table(records, modes)
    if a.out:
        prefix = Path(a.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        prefix.with_suffix(".csv").write_text(csv_text, newline="")
        prefix.with_suffix(".md").write_text(table)
    else:
        out.write(csv_text.replace("\r\n", "\n") + "\n")
    out.write(table)
    return EXIT_OK


def cmd_diff(a, out) -> int:
    cmd = harness.external_command(a.external_solver)
    if not cmd:
        print(f"no external solver: pass --external-solver or set ${harness.ENV_EXTERNAL}",
              file=sys.stderr)
        return EXIT_USAGE
    status, ours, theirs = harness.diff_script(_load(a.path), _config(a), cmd)
    extra = f" ({theirs.detail})" if theirs.detail else ""
    print(f"{status}: ours={ours} external={theirs.verdict}{extra}", file=out)
    return EXIT_MISMATCH if status == "MISMATCH" else EXIT_OK


COMMANDS = {"solve": cmd_solve, "fragment": cmd_fragment, "bench": cmd_bench, "diff": cmd_diff}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    a = build_parser().parse_args(argv)
    try:
        return COMMANDS[a.command](a, out)
    except (OSError, SmtParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_UNKNOWN


if __name__ == "__main__":
    sys.exit(main())

"""Batch runs, result tables and the external-solver bridge."""
from __future__ import annotations

import csv
import hashlib
import io
import multiprocessing as mp
import os
import shlex
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .mbqi import MODES, RESOURCE_OUT, Config, solve
from .smtlib import parse_script, print_script

ENV_EXTERNAL = "PWLMBQI_EXTERNAL_SOLVER"
GRACE = 1.0


@dataclass
class BenchRecord:
    problem: str
    mode: str
    verdict: str
    time: float
    iterations: int
    instantiations: int


CSV_COLUMNS = [f.name for f in fields(BenchRecord)]


def verdict_word(v: str) -> str:
    return "unknown" if v == RESOURCE_OUT else v


def _worker(path, cfg, conn):
    try:
        r = solve(parse_script(Path(path).read_text()), cfg)
        conn.send((r.verdict, r.stats.get("iterations", 0), r.stats.get("instantiations", 0)))
    except Exception as e:  # reported as unknown by the parent
        conn.send(("error", 0, 0, repr(e)))
    finally:
        conn.close()


def run_one(path, cfg: Config) -> BenchRecord:
    """Solve ``path`` in a child process that is killed at ``timeout + GRACE``."""
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    recv, send = ctx.Pipe(duplex=False)
    p = ctx.Process(target=_worker, args=(str(path), cfg, send), daemon=True)
    start = time.monotonic()
    p.start()
    send.close()
    verdict, iters, insts = "unknown", 0, 0
    if recv.poll(cfg.timeout + GRACE):
        try:
            msg = recv.recv()
            verdict, iters, insts = msg[0], msg[1], msg[2]
        except EOFError:
            verdict = "error"
    else:
        verdict = RESOURCE_OUT
    elapsed = time.monotonic() - start
    if p.is_alive():
        p.kill()
    p.join()
    recv.close()
    return BenchRecord(str(path), cfg.mode, verdict_word(verdict), round(elapsed, 4), iters, insts)


def list_problems(directory) -> list:
    """Sorted ``*.smt2`` files; byte-identical files (e.g. repeated fragments) are kept once."""
    seen, out = set(), []
    for p in sorted(Path(directory).rglob("*.smt2")):
        h = hashlib.sha256(p.read_bytes()).hexdigest()
        if h not in seen:
            seen.add(h)
            out.append(p)
    return out


def bench(directory, cfg: Config, modes=MODES, jobs=None) -> list:
    """One record per (problem, mode), in input order."""
    problems = list_problems(directory)
    tasks = [(p, Config(**{**asdict(cfg), "mode": m})) for p in problems for m in modes]
    jobs = jobs or os.cpu_count() or 1
    if jobs == 1 or len(tasks) <= 1:
        return [run_one(p, c) for p, c in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(lambda t: run_one(*t), tasks))


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([getattr(r, c) for c in CSV_COLUMNS])
    return buf.getvalue()


def summary(records, modes) -> dict:
    out = {m: {"sat": 0, "unsat": 0} for m in modes}
    for r in records:
        if r.verdict in ("sat", "unsat"):
            out.setdefault(r.mode, {"sat": 0, "unsat": 0})[r.verdict] += 1
    return out


def markdown_table(records, modes) -> str:
    lines = ["| solver | solved: SAT | solved: UNSAT | solved: total |",
             "|---|---:|---:|---:|"]
    for m, c in summary(records, modes).items():
        lines.append(f"| {m} | {c['sat']} | {c['unsat']} | {c['sat'] + c['unsat']} |")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# external solver

def external_command(cli_value=None):
    cmd = cli_value or os.environ.get(ENV_EXTERNAL)
    return shlex.split(cmd) if cmd else None


@dataclass
class ExternalResult:
    verdict: str  # sat | unsat | unknown | timeout | error
    detail: str = ""


def run_external(cmd, script_text: str, timeout: float) -> ExternalResult:
    try:
        proc = subprocess.run(cmd, input=script_text, capture_output=True, text=True,
                              timeout=timeout)
    except subprocess.TimeoutExpired:
        return ExternalResult("timeout")
    except OSError as e:
        return ExternalResult("error", str(e))
    first = next((l.strip() for l in proc.stdout.splitlines() if l.strip()), "")
    if first in ("sat", "unsat", "unknown"):
        return ExternalResult(first)
    return ExternalResult("error", (proc.stderr or proc.stdout).strip()[:200])


def compare(ours: str, theirs: str) -> str:
    """``ok``, ``inconclusive`` or ``MISMATCH``; unknown never conflicts."""
    definitive = ("sat", "unsat")
    if ours in definitive and theirs in definitive:
        return "ok" if ours == theirs else "MISMATCH"
    return "inconclusive"


def diff_script(script, cfg: Config, cmd) -> tuple:
    """Return ``(status, our verdict, external result)``."""
    ours = verdict_word(solve(script, cfg).verdict)
    theirs = run_external(cmd, print_script(script), cfg.timeout)
    return compare(ours, theirs.verdict), ours, theirs

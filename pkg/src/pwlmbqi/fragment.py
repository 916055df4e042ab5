"""Fragments of a script restricted to a chosen set of uninterpreted functions."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .smtlib import Script, print_script, relax_sorts
from .terms import applied_symbols


@dataclass(frozen=True)
class FragmentSpec:
    k: int
    symbols: frozenset
    source: Script

    def __post_init__(self):
        if self.k < 1 or len(self.symbols) != self.k:
            raise ValueError("k must be positive and match the number of symbols")
        missing = set(self.symbols) - set(self.source.function_symbols())
        if missing:
            raise ValueError(f"symbols not in script: {sorted(missing)}")


def fragment(s: Script, symbols) -> Script:
    """Keep assertions using some chosen function and no other function.

    0-ary symbols are constants: they neither qualify nor disqualify.
    """
    symbols = set(symbols)
    funcs = set(s.function_symbols())
    unknown = symbols - funcs
    if unknown:
        raise ValueError(f"not an uninterpreted function of the script: {sorted(unknown)}")
    kept = []
    for a in s.assertions:
        used = applied_symbols(a) & funcs
        if used & symbols and used <= symbols:
            kept.append(a)
    names = set()
    for a in kept:
        names |= applied_symbols(a)
    decls = [d for d in s.declarations if d.name in names]
    return relax_sorts(Script(decls, kept, s.logic, list(s.info), list(s.sorts)))


def enumerate_fragments(s: Script, k: int, cap: int | None = None) -> list:
    """One non-empty fragment per k-subset of function symbols, in lexicographic order."""
    if k < 1:
        raise ValueError("k must be positive")
    out = []
    for combo in combinations(sorted(s.function_symbols()), k):
        if cap is not None and len(out) >= cap:
            break
        fr = fragment(s, combo)
        if fr.assertions:
            out.append((combo, fr))
    return out


def fragment_filename(base: str, symbols) -> str:
    return f"{base}.{'-'.join(symbols)}.smt2"


def write_fragments(s: Script, k: int, out_dir, base: str, cap: int | None = None) -> list:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for combo, fr in enumerate_fragments(s, k, cap):
        p = out_dir / fragment_filename(base, combo)
        p.write_text(print_script(fr))
        paths.append(p)
    return paths

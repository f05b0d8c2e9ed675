"""TPTP FOF serialization for external provers, plus SZS result parsing.

Identifiers are sanitized to the TPTP lexical classes reversibly: primes
become `_prime` (`a'` -> `a_prime`), names that would not start lowercase
get a `c` prefix, and collisions pick up a numeric suffix. One sanitizer
instance per obligation keeps the mapping bijective.
"""

from __future__ import annotations

import re

from .fol import (
    And,
    App,
    Const,
    Equal,
    Exists,
    Falsum,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Pred,
    Term,
    Var,
)
from .obligations import Obligation

_LOWER_NAME = re.compile(r"[a-z][a-zA-Z0-9_]*")


class Sanitizer:
    """Bijective renaming of document identifiers into TPTP lower words."""

    def __init__(self) -> None:
        self.forward: dict[str, str] = {}
        self.backward: dict[str, str] = {}

    def sanitize(self, name: str) -> str:
        if name in self.forward:
            return self.forward[name]
        base = name.replace("'", "_prime")
        if not _LOWER_NAME.fullmatch(base):
            base = "c" + base
            base = base.lower()
        if not _LOWER_NAME.fullmatch(base):
            base = "c" + re.sub(r"[^a-zA-Z0-9_]", "_", base)
        out = base
        k = 2
        while out in self.backward:
            out = f"{base}_{k}"
            k += 1
        self.forward[name] = out
        self.backward[out] = name
        return out

    def desanitize(self, name: str) -> str:
        return self.backward[name]


def _label_name(label: str, sanitizer: Sanitizer) -> str:
    base = label.replace("'", "_prime").lower()
    base = re.sub(r"[^a-z0-9_]", "_", base)
    if not base or not base[0].isalpha():
        base = "p" + base
    out = base
    k = 2
    while out in sanitizer.backward and sanitizer.backward[out] != f"label:{label}":
        out = f"{base}_{k}"
        k += 1
    sanitizer.backward[out] = f"label:{label}"
    return out


def _render_term(t: Term, sanitizer: Sanitizer, bound: dict[str, str]) -> str:
    if isinstance(t, Var):
        return bound[t.name]
    if isinstance(t, Const):
        return sanitizer.sanitize(t.name)
    assert isinstance(t, App)
    args = ",".join(_render_term(a, sanitizer, bound) for a in t.args)
    return f"{sanitizer.sanitize(t.name)}({args})"


def _upper_var(name: str, taken: set[str]) -> str:
    base = name.replace("'", "_prime")
    base = base[0].upper() + base[1:]
    if not re.fullmatch(r"[A-Z][a-zA-Z0-9_]*", base):
        base = "V" + re.sub(r"[^a-zA-Z0-9_]", "_", base)
    out = base
    k = 2
    while out in taken:
        out = f"{base}{k}"
        k += 1
    return out


def render_formula(f: Formula, sanitizer: Sanitizer, bound: dict[str, str] | None = None) -> str:
    """Render as a TPTP unitary formula, parenthesizing binary connectives."""
    bound = bound or {}
    if isinstance(f, Pred):
        name = sanitizer.sanitize(f.name)
        if not f.args:
            return name
        return f"{name}({','.join(_render_term(a, sanitizer, bound) for a in f.args)})"
    if isinstance(f, Equal):
        return f"{_render_term(f.lhs, sanitizer, bound)} = {_render_term(f.rhs, sanitizer, bound)}"
    if isinstance(f, Falsum):
        return "$false"
    if isinstance(f, Not):
        if isinstance(f.body, Equal):
            lhs = _render_term(f.body.lhs, sanitizer, bound)
            rhs = _render_term(f.body.rhs, sanitizer, bound)
            return f"{lhs} != {rhs}"
        return f"~ {_unitary(f.body, sanitizer, bound)}"
    if isinstance(f, (And, Or, Implies, Iff)):
        op = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}[type(f)]
        return (
            f"({render_formula(f.left, sanitizer, bound)} {op} "
            f"{render_formula(f.right, sanitizer, bound)})"
        )
    if isinstance(f, (Forall, Exists)):
        q = "!" if isinstance(f, Forall) else "?"
        taken = set(bound.values())
        new_bound = dict(bound)
        names = []
        for v in f.vars:
            uv = _upper_var(v, taken)
            taken.add(uv)
            new_bound[v] = uv
            names.append(uv)
        return f"{q}[{','.join(names)}]: {_unitary(f.body, sanitizer, new_bound)}"
    raise AssertionError(f"unknown formula {f!r}")


def _unitary(f: Formula, sanitizer: Sanitizer, bound: dict[str, str]) -> str:
    """Wrap binary connectives and equalities so they nest as unitary formulas."""
    text = render_formula(f, sanitizer, bound)
    if isinstance(f, (And, Or, Implies, Iff)) or text.startswith("("):
        return text
    if isinstance(f, Equal) or (isinstance(f, Not) and isinstance(f.body, Equal)):
        return f"({text})"
    return text


def to_tptp(ob: Obligation) -> str:
    """One `fof` axiom line per premise (sorted by label) plus the conjecture."""
    sanitizer = Sanitizer()
    lines = []
    for label, formula in sorted(ob.premises, key=lambda p: p[0]):
        lines.append(
            f"fof({_label_name(label, sanitizer)}, axiom, {render_formula(formula, sanitizer)})."
        )
    lines.append(f"fof(goal, conjecture, {render_formula(ob.goal, sanitizer)}).")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SZS status lines

_SZS_RE = re.compile(r"SZS\s+status\s+(\w+)")

_SZS_MAP = {
    "Theorem": "theorem",
    "Unsatisfiable": "theorem",
    "ContradictoryAxioms": "theorem",
    "CounterSatisfiable": "countersatisfiable",
    "Satisfiable": "countersatisfiable",
    "Timeout": "timeout",
    "ResourceOut": "timeout",
    "GaveUp": "unknown",
    "Unknown": "unknown",
}


def parse_szs(output: str) -> str:
    """Scan raw prover output for an SZS status line.

    Returns theorem | countersatisfiable | timeout | unknown.
    """
    for match in _SZS_RE.finditer(output):
        mapped = _SZS_MAP.get(match.group(1))
        if mapped is not None:
            return mapped
    return "unknown"

"""Bounded countermodel search and the brute-force evaluation oracle.

A countermodel for an obligation is a finite interpretation making every
premise true and the goal false. The search grounds premises + negated goal
over domains n = 1..max_n, encodes the result to CNF (Tseitin) and hands it
to the SAT kernel; constant interpretations are enumerated as restricted
growth strings, which is exhaustive up to domain isomorphism because the
predicate tables are searched freely. Existential quantifiers are expanded
over the domain directly, so no Skolem machinery is needed here. Any model
found is re-verified with `evaluate` before it is returned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product

from .errors import UninterpretedSymbol
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
    formula_signature,
)
from .obligations import Obligation
from .sat import solve_cnf


@dataclass
class Model:
    """Finite interpretation; equality is identity on elements."""

    size: int
    constants: dict[str, int] = field(default_factory=dict)
    predicates: dict[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)
    pred_arities: dict[str, int] = field(default_factory=dict)
    functions: dict[str, dict[tuple[int, ...], int]] = field(default_factory=dict)

    def text(self) -> str:
        """Stable text rendering: domain, constants, one line per true atom."""
        lines = [f"domain = {{{', '.join(str(i) for i in range(self.size))}}}"]
        for name in sorted(self.constants):
            lines.append(f"{name} = {self.constants[name]}")
        for name in sorted(self.functions):
            for args in sorted(self.functions[name]):
                rendered = ",".join(str(a) for a in args)
                lines.append(f"{name}({rendered}) = {self.functions[name][args]}")
        for name in sorted(self.predicates):
            for args in sorted(self.predicates[name]):
                lines.append(f"{name}({','.join(str(a) for a in args)})")
        return "\n".join(lines)


def eval_term(t: Term, m: Model, env: dict[str, int]) -> int:
    if isinstance(t, Var):
        if t.name not in env:
            raise UninterpretedSymbol(f"unbound variable {t.name!r}")
        return env[t.name]
    if isinstance(t, Const):
        if t.name not in m.constants:
            raise UninterpretedSymbol(f"constant {t.name!r} has no interpretation")
        return m.constants[t.name]
    assert isinstance(t, App)
    if t.name not in m.functions:
        raise UninterpretedSymbol(f"function {t.name!r} has no interpretation")
    args = tuple(eval_term(a, m, env) for a in t.args)
    table = m.functions[t.name]
    if args not in table:
        raise UninterpretedSymbol(f"function {t.name!r} undefined on {args}")
    return table[args]


def evaluate(f: Formula, m: Model, env: dict[str, int] | None = None) -> bool:
    """Tarskian satisfaction by structural recursion."""
    env = env or {}
    if isinstance(f, Pred):
        if f.name not in m.predicates:
            raise UninterpretedSymbol(f"predicate {f.name!r} has no interpretation")
        return tuple(eval_term(a, m, env) for a in f.args) in m.predicates[f.name]
    if isinstance(f, Equal):
        return eval_term(f.lhs, m, env) == eval_term(f.rhs, m, env)
    if isinstance(f, Falsum):
        return False
    if isinstance(f, Not):
        return not evaluate(f.body, m, env)
    if isinstance(f, And):
        return evaluate(f.left, m, env) and evaluate(f.right, m, env)
    if isinstance(f, Or):
        return evaluate(f.left, m, env) or evaluate(f.right, m, env)
    if isinstance(f, Implies):
        return (not evaluate(f.left, m, env)) or evaluate(f.right, m, env)
    if isinstance(f, Iff):
        return evaluate(f.left, m, env) == evaluate(f.right, m, env)
    if isinstance(f, Forall):
        return all(
            evaluate(f.body, m, _extend(env, f.vars, combo))
            for combo in product(range(m.size), repeat=len(f.vars))
        )
    if isinstance(f, Exists):
        return any(
            evaluate(f.body, m, _extend(env, f.vars, combo))
            for combo in product(range(m.size), repeat=len(f.vars))
        )
    raise AssertionError(f"unknown formula {f!r}")


def _extend(env: dict[str, int], names: tuple[str, ...], values: tuple[int, ...]) -> dict[str, int]:
    out = dict(env)
    out.update(zip(names, values))
    return out


def falsifies(m: Model, ob: Obligation) -> bool:
    """True when m satisfies every premise and falsifies the goal."""
    return all(evaluate(f, m) for _, f in ob.premises) and not evaluate(ob.goal, m)


# ---------------------------------------------------------------------------
# Grounding to propositional structure

_TRUE = ("T",)
_FALSE = ("F",)


class _AtomTable:
    def __init__(self) -> None:
        self.ids: dict[tuple, int] = {}
        self.atoms: list[tuple] = []

    def id_of(self, key: tuple) -> int:
        got = self.ids.get(key)
        if got is None:
            got = len(self.atoms)
            self.ids[key] = got
            self.atoms.append(key)
        return got


def _ground_term(
    t: Term,
    env: dict[str, int],
    consts: dict[str, int],
    funcs: dict[str, dict[tuple[int, ...], int]],
) -> int:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return consts[t.name]
    assert isinstance(t, App)
    args = tuple(_ground_term(a, env, consts, funcs) for a in t.args)
    return funcs[t.name][args]


def _ground(
    f: Formula,
    env: dict[str, int],
    consts: dict[str, int],
    funcs: dict[str, dict[tuple[int, ...], int]],
    n: int,
    atoms: _AtomTable,
    sign: bool,
):
    """NNF propositional tree over ground atoms; quantifiers expand over the domain."""
    if isinstance(f, Pred):
        elems = tuple(_ground_term(a, env, consts, funcs) for a in f.args)
        lit = atoms.id_of((f.name, elems)) + 1
        return ("L", lit if sign else -lit)
    if isinstance(f, Equal):
        same = _ground_term(f.lhs, env, consts, funcs) == _ground_term(f.rhs, env, consts, funcs)
        return _TRUE if same == sign else _FALSE
    if isinstance(f, Falsum):
        return _FALSE if sign else _TRUE
    if isinstance(f, Not):
        return _ground(f.body, env, consts, funcs, n, atoms, not sign)
    if isinstance(f, Iff):
        expanded = And(Implies(f.left, f.right), Implies(f.right, f.left))
        return _ground(expanded, env, consts, funcs, n, atoms, sign)
    if isinstance(f, (And, Or)):
        conj = isinstance(f, And) == sign
        kids = [
            _ground(f.left, env, consts, funcs, n, atoms, sign),
            _ground(f.right, env, consts, funcs, n, atoms, sign),
        ]
        return _combine(conj, kids)
    if isinstance(f, Implies):
        kids = [
            _ground(f.left, env, consts, funcs, n, atoms, not sign),
            _ground(f.right, env, consts, funcs, n, atoms, sign),
        ]
        return _combine(not sign, kids)
    if isinstance(f, (Forall, Exists)):
        conj = isinstance(f, Forall) == sign
        kids = []
        for combo in product(range(n), repeat=len(f.vars)):
            kids.append(
                _ground(f.body, _extend(env, f.vars, combo), consts, funcs, n, atoms, sign)
            )
        return _combine(conj, kids)
    raise AssertionError(f"unknown formula {f!r}")


def _combine(conj: bool, kids: list):
    flat = []
    for k in kids:
        if conj and k == _TRUE:
            continue
        if not conj and k == _FALSE:
            continue
        if conj and k == _FALSE:
            return _FALSE
        if not conj and k == _TRUE:
            return _TRUE
        if k[0] == ("&" if conj else "|"):
            flat.extend(k[1])
            continue
        flat.append(k)
    if not flat:
        return _TRUE if conj else _FALSE
    if len(flat) == 1:
        return flat[0]
    return ("&" if conj else "|", tuple(flat))


def _tseitin(roots: list, first_aux: int) -> tuple[list[tuple[int, ...]], int] | None:
    """CNF clauses asserting every root; returns None when a root is constant false."""
    clauses: list[tuple[int, ...]] = []
    next_aux = first_aux

    def lit_of(node) -> int:
        nonlocal next_aux
        if node[0] == "L":
            return node[1]
        kids = [lit_of(k) for k in node[1]]
        a = next_aux
        next_aux += 1
        if node[0] == "&":
            for k in kids:
                clauses.append((-a, k))
            clauses.append(tuple([a] + [-k for k in kids]))
        else:
            for k in kids:
                clauses.append((a, -k))
            clauses.append(tuple([-a] + kids))
        return a

    for r in roots:
        if r == _TRUE:
            continue
        if r == _FALSE:
            return None
        if r[0] == "L":
            clauses.append((r[1],))
        elif r[0] == "&":
            # Top-level conjunction: assert children directly.
            stack = list(r[1])
            ok = True
            while stack:
                k = stack.pop()
                if k == _TRUE:
                    continue
                if k == _FALSE:
                    return None
                if k[0] == "&":
                    stack.extend(k[1])
                elif k[0] == "L":
                    clauses.append((k[1],))
                else:
                    clauses.append((lit_of(k),))
            if not ok:
                return None
        else:
            clauses.append((lit_of(r),))
    return clauses, next_aux


def _canonical_assignments(k: int, n: int):
    """Restricted growth strings: constant interpretations up to isomorphism."""
    if k == 0:
        yield ()
        return
    string = [0] * k

    def rec(i: int, mx: int):
        if i == k:
            yield tuple(string)
            return
        for v in range(min(mx + 1, n - 1) + 1):
            string[i] = v
            yield from rec(i + 1, max(mx, v))

    yield from rec(1, 0) if k > 1 else iter([(0,)])


def _merge_signature(formulas: list[Formula]):
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}
    consts: list[str] = []
    for f in formulas:
        p, fn, c = formula_signature(f)
        preds.update(p)
        funcs.update(fn)
        for name in sorted(c):
            if name not in consts:
                consts.append(name)
    return preds, funcs, consts


def find_countermodel(
    ob: Obligation, max_n: int = 3, budget_ms: int = 3000, cancel=None
) -> Model | None:
    """Search domains 1..max_n for a model of the premises falsifying the goal.

    Returns the first confirmed model, or None (also on budget exhaustion or
    cancellation).
    """
    deadline = time.monotonic() + budget_ms / 1000.0
    premises = [f for _, f in ob.premises]
    formulas = premises + [ob.goal]
    preds, funcs, const_names = _merge_signature(formulas)

    for n in range(1, max_n + 1):
        func_spaces: list[list[tuple[str, dict[tuple[int, ...], int]]]] = []
        if funcs:
            total = 1
            for name in sorted(funcs):
                total *= n ** (n ** funcs[name])
                if total > 4096:
                    return None  # function table space too large to enumerate
            func_spaces = [
                [
                    (name, dict(zip(list(product(range(n), repeat=funcs[name])), values)))
                    for values in product(range(n), repeat=n ** funcs[name])
                ]
                for name in sorted(funcs)
            ]
        else:
            func_spaces = []

        for assignment in _canonical_assignments(len(const_names), n):
            consts = dict(zip(const_names, assignment))
            for func_combo in product(*func_spaces) if func_spaces else [()]:
                if time.monotonic() > deadline:
                    return None
                if cancel is not None and cancel.is_set():
                    return None
                func_tables = {name: table for name, table in func_combo}
                atoms = _AtomTable()
                roots = []
                for f in premises:
                    roots.append(_ground(f, {}, consts, func_tables, n, atoms, True))
                roots.append(_ground(ob.goal, {}, consts, func_tables, n, atoms, False))
                got = _tseitin(roots, len(atoms.atoms) + 1)
                if got is None:
                    continue
                clauses, next_aux = got
                remaining = max(0.05, deadline - time.monotonic())
                status, sat_model = solve_cnf(next_aux - 1, clauses, remaining)
                if status != "sat":
                    continue
                model = _extract_model(n, consts, preds, func_tables, atoms, sat_model)
                if falsifies(model, ob):
                    return model
    return None


def _extract_model(
    n: int,
    consts: dict[str, int],
    preds: dict[str, int],
    func_tables: dict[str, dict[tuple[int, ...], int]],
    atoms: _AtomTable,
    sat_model: list[int],
) -> Model:
    tables: dict[str, set[tuple[int, ...]]] = {name: set() for name in preds}
    for i, (name, elems) in enumerate(atoms.atoms):
        if sat_model[i + 1] == 1:
            tables.setdefault(name, set()).add(elems)
    return Model(
        size=n,
        constants=dict(consts),
        predicates={name: frozenset(t) for name, t in tables.items()},
        pred_arities=dict(preds),
        functions={name: dict(t) for name, t in func_tables.items()},
    )

"""Pure-Python DPLL kernel: the fallback when the compiled core is absent.

Same algorithm and same answers as the Cython twin in _satcore.pyx:
two-watched-literal unit propagation, static activity order, false-first
phase (which biases countermodels toward sparse predicate tables), and
chronological backtracking. Input literals use the DIMACS convention
(+v / -v for variable v, 1-based).
"""

from __future__ import annotations

import time

KERNEL = "python"


def solve_cnf(
    num_vars: int,
    clauses: list[tuple[int, ...]],
    budget_s: float = 0.0,
) -> tuple[str, list[int] | None]:
    """Returns ("sat", assignment[1..num_vars] of 0/1), ("unsat", None) or
    ("timeout", None)."""
    deadline = time.monotonic() + budget_s if budget_s > 0 else None

    db: list[list[int]] = []
    units: list[int] = []
    score = [0] * (num_vars + 1)
    for cl in clauses:
        lits = list(dict.fromkeys(cl))
        pos = set(lits)
        if any(-l in pos for l in lits):
            continue
        if not lits:
            return ("unsat", None)
        for l in lits:
            score[abs(l)] += 1
        if len(lits) == 1:
            units.append(lits[0])
        else:
            db.append(lits)

    assign = [-1] * (num_vars + 1)
    watches: dict[int, list[int]] = {}
    for ci, cl in enumerate(db):
        watches.setdefault(cl[0], []).append(ci)
        watches.setdefault(cl[1], []).append(ci)

    order = sorted(range(1, num_vars + 1), key=lambda v: (-score[v], v))
    trail: list[int] = []
    decisions: list[tuple[int, int, bool]] = []  # (trail length before, lit, flipped)
    qhead = 0
    ticks = 0

    def value(lit: int) -> int:
        a = assign[abs(lit)]
        if a == -1:
            return -1
        return a if lit > 0 else 1 - a

    def enqueue(lit: int) -> bool:
        v = value(lit)
        if v == 1:
            return True
        if v == 0:
            return False
        assign[abs(lit)] = 1 if lit > 0 else 0
        trail.append(lit)
        return True

    def propagate() -> bool:
        nonlocal qhead, ticks
        while qhead < len(trail):
            ticks += 1
            if deadline is not None and ticks % 4096 == 0 and time.monotonic() > deadline:
                raise TimeoutError
            false_lit = -trail[qhead]
            qhead += 1
            watching = watches.get(false_lit)
            if not watching:
                continue
            keep: list[int] = []
            for ci in watching:
                cl = db[ci]
                if cl[0] == false_lit:
                    cl[0], cl[1] = cl[1], cl[0]
                if value(cl[0]) == 1:
                    keep.append(ci)
                    continue
                moved = False
                for k in range(2, len(cl)):
                    if value(cl[k]) != 0:
                        cl[1], cl[k] = cl[k], cl[1]
                        watches.setdefault(cl[1], []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                if not enqueue(cl[0]):
                    keep.extend(watching[watching.index(ci) + 1:])
                    watches[false_lit] = keep
                    return False
            watches[false_lit] = keep
        return True

    def backtrack() -> bool:
        nonlocal qhead
        while decisions:
            start, lit, flipped = decisions.pop()
            for l in trail[start:]:
                assign[abs(l)] = -1
            del trail[start:]
            qhead = start
            if not flipped:
                decisions.append((start, -lit, True))
                assign[abs(lit)] = 0 if lit > 0 else 1
                trail.append(-lit)
                return True
        return False

    try:
        for u in units:
            if not enqueue(u):
                return ("unsat", None)
        if not propagate():
            return ("unsat", None)
        oi = 0
        while True:
            while oi < len(order) and assign[order[oi]] != -1:
                oi += 1
            if oi >= len(order):
                return ("sat", list(assign))
            v = order[oi]
            decisions.append((len(trail), -v, False))
            assign[v] = 0
            trail.append(-v)
            while not propagate():
                if not backtrack():
                    return ("unsat", None)
                oi = 0
    except TimeoutError:
        return ("timeout", None)

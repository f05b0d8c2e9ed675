# cython: boundscheck=False, wraparound=False, initializedcheck=False, language_level=3
"""Compiled DPLL kernel: the hot loop behind the countermodel finder.

Behaviour mirrors elfe.sat.pure exactly (two watched literals, static
activity order, false-first phase, chronological backtracking) so either
kernel can be selected at import time with identical results.
"""

import time

from libc.stdlib cimport free, malloc, realloc

KERNEL = "compiled"

cdef struct WatchList:
    int* data
    int size
    int cap


cdef inline void wl_push(WatchList* wl, int ci) noexcept nogil:
    if wl.size == wl.cap:
        wl.cap = wl.cap * 2 if wl.cap else 4
        wl.data = <int*> realloc(wl.data, wl.cap * sizeof(int))
    wl.data[wl.size] = ci
    wl.size += 1


cdef inline int lit_index(int lit) noexcept nogil:
    # variable v: positive literal 2v, negative 2v+1
    return 2 * lit if lit > 0 else -2 * lit + 1


def solve_cnf(int num_vars, clauses, double budget_s=0.0):
    """Returns ("sat", assignment list), ("unsat", None) or ("timeout", None)."""
    cdef double deadline = 0.0
    cdef bint has_deadline = budget_s > 0
    if has_deadline:
        deadline = time.monotonic() + budget_s

    # ---- normalize clauses in Python land -------------------------------
    db = []
    units = []
    score = [0] * (num_vars + 1)
    for cl in clauses:
        lits = list(dict.fromkeys(cl))
        pos = set(lits)
        skip = False
        for l in lits:
            if -l in pos:
                skip = True
                break
        if skip:
            continue
        if not lits:
            return ("unsat", None)
        for l in lits:
            score[l if l > 0 else -l] += 1
        if len(lits) == 1:
            units.append(lits[0])
        else:
            db.append(lits)

    order_py = sorted(range(1, num_vars + 1), key=lambda v: (-score[v], v))

    cdef int n_clauses = len(db)
    cdef int total_lits = 0
    for cl in db:
        total_lits += len(cl)

    cdef int* cl_lits = <int*> malloc(max(total_lits, 1) * sizeof(int))
    cdef int* cl_start = <int*> malloc((n_clauses + 1) * sizeof(int))
    cdef WatchList* watches = <WatchList*> malloc(
        (2 * num_vars + 2) * sizeof(WatchList)
    )
    cdef char* assign = <char*> malloc((num_vars + 1) * sizeof(char))
    cdef int* trail = <int*> malloc((num_vars + 1) * sizeof(int))
    cdef int* dec_start = <int*> malloc((num_vars + 1) * sizeof(int))
    cdef int* dec_lit = <int*> malloc((num_vars + 1) * sizeof(int))
    cdef char* dec_flipped = <char*> malloc((num_vars + 1) * sizeof(char))
    cdef int* order = <int*> malloc(max(num_vars, 1) * sizeof(int))

    cdef int i, j, k, pos_i
    try:
        for i in range(2 * num_vars + 2):
            watches[i].data = NULL
            watches[i].size = 0
            watches[i].cap = 0
        pos_i = 0
        for i in range(n_clauses):
            cl_start[i] = pos_i
            cl = db[i]
            for l in cl:
                cl_lits[pos_i] = l
                pos_i += 1
        cl_start[n_clauses] = pos_i
        for i in range(n_clauses):
            wl_push(&watches[lit_index(cl_lits[cl_start[i]])], i)
            wl_push(&watches[lit_index(cl_lits[cl_start[i] + 1])], i)
        for i in range(num_vars + 1):
            assign[i] = -1
        for i in range(num_vars):
            order[i] = order_py[i]

        cdef_result = _search(
            num_vars, n_clauses, cl_lits, cl_start, watches, assign, trail,
            dec_start, dec_lit, dec_flipped, order, units,
            has_deadline, deadline,
        )
        if cdef_result == 1:
            return ("sat", [assign[i] for i in range(num_vars + 1)])
        if cdef_result == 0:
            return ("unsat", None)
        return ("timeout", None)
    finally:
        for i in range(2 * num_vars + 2):
            if watches[i].data != NULL:
                free(watches[i].data)
        free(cl_lits)
        free(cl_start)
        free(watches)
        free(assign)
        free(trail)
        free(dec_start)
        free(dec_lit)
        free(dec_flipped)
        free(order)


cdef int _search(
    int num_vars,
    int n_clauses,
    int* cl_lits,
    int* cl_start,
    WatchList* watches,
    char* assign,
    int* trail,
    int* dec_start,
    int* dec_lit,
    char* dec_flipped,
    int* order,
    units,
    bint has_deadline,
    double deadline,
):
    """1 sat, 0 unsat, -1 timeout."""
    cdef int trail_len = 0
    cdef int qhead = 0
    cdef int n_dec = 0
    cdef long ticks = 0
    cdef int u, v, oi, lit

    for u in units:
        if not _enqueue(u, assign, trail, &trail_len):
            return 0

    while True:
        lit = _propagate(
            cl_lits, cl_start, watches, assign, trail, &trail_len, &qhead,
            &ticks, has_deadline, deadline,
        )
        if lit == -2:
            return -1  # timeout
        if lit == -1:
            # conflict: chronological backtrack
            while True:
                if n_dec == 0:
                    return 0
                n_dec -= 1
                for v in range(dec_start[n_dec], trail_len):
                    assign[trail[v] if trail[v] > 0 else -trail[v]] = -1
                trail_len = dec_start[n_dec]
                qhead = trail_len
                if not dec_flipped[n_dec]:
                    u = -dec_lit[n_dec]
                    dec_lit[n_dec] = u
                    dec_flipped[n_dec] = 1
                    dec_start[n_dec] = trail_len
                    n_dec += 1
                    assign[u if u > 0 else -u] = 1 if u > 0 else 0
                    trail[trail_len] = u
                    trail_len += 1
                    break
            continue
        # no conflict: pick a decision variable
        oi = 0
        v = 0
        for oi in range(num_vars):
            if assign[order[oi]] == -1:
                v = order[oi]
                break
        if v == 0:
            return 1  # all assigned
        dec_start[n_dec] = trail_len
        dec_lit[n_dec] = -v
        dec_flipped[n_dec] = 0
        n_dec += 1
        assign[v] = 0
        trail[trail_len] = -v
        trail_len += 1


cdef inline bint _enqueue(int lit, char* assign, int* trail, int* trail_len) noexcept nogil:
    cdef int var = lit if lit > 0 else -lit
    cdef char want = 1 if lit > 0 else 0
    if assign[var] != -1:
        return assign[var] == want
    assign[var] = want
    trail[trail_len[0]] = lit
    trail_len[0] += 1
    return True


cdef inline int _value(int lit, char* assign) noexcept nogil:
    cdef int var = lit if lit > 0 else -lit
    cdef char a = assign[var]
    if a == -1:
        return -1
    if lit > 0:
        return a
    return 1 - a


cdef int _propagate(
    int* cl_lits,
    int* cl_start,
    WatchList* watches,
    char* assign,
    int* trail,
    int* trail_len,
    int* qhead,
    long* ticks,
    bint has_deadline,
    double deadline,
):
    """0 on success, -1 on conflict, -2 on timeout."""
    cdef int false_lit, ci, start, end, tmp, moved, write_i, read_i, k
    cdef WatchList* wl
    while qhead[0] < trail_len[0]:
        ticks[0] += 1
        if has_deadline and ticks[0] % 4096 == 0:
            if time.monotonic() > deadline:
                return -2
        false_lit = -trail[qhead[0]]
        qhead[0] += 1
        wl = &watches[lit_index(false_lit)]
        write_i = 0
        read_i = 0
        while read_i < wl.size:
            ci = wl.data[read_i]
            read_i += 1
            start = cl_start[ci]
            end = cl_start[ci + 1]
            if cl_lits[start] == false_lit:
                tmp = cl_lits[start]
                cl_lits[start] = cl_lits[start + 1]
                cl_lits[start + 1] = tmp
            if _value(cl_lits[start], assign) == 1:
                wl.data[write_i] = ci
                write_i += 1
                continue
            moved = 0
            for k in range(start + 2, end):
                if _value(cl_lits[k], assign) != 0:
                    tmp = cl_lits[start + 1]
                    cl_lits[start + 1] = cl_lits[k]
                    cl_lits[k] = tmp
                    wl_push(&watches[lit_index(cl_lits[start + 1])], ci)
                    moved = 1
                    break
            if moved:
                continue
            wl.data[write_i] = ci
            write_i += 1
            if not _enqueue(cl_lits[start], assign, trail, trail_len):
                while read_i < wl.size:
                    wl.data[write_i] = wl.data[read_i]
                    write_i += 1
                    read_i += 1
                wl.size = write_i
                return -1
        wl.size = write_i
    return 0

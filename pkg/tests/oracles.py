"""Brute-force reference computations, independent of the package code paths."""
from __future__ import annotations

from collections import defaultdict
from functools import lru_cache
from itertools import product


def recurrence_terms(coeffs, n, inits=()):
    """Direct evaluation with f_0 = 1, explicit f_1..f_{k-1}, zero before 0."""
    f = {0: 1}
    for i, h in enumerate(inits, start=1):
        f[i] = h
    for m in range(1, n + 1):
        if m not in f:
            f[m] = sum(a * f.get(m - i, 0) for i, a in enumerate(coeffs, start=1))
    return [f[m] for m in range(n + 1)]


def dyck_paths(semilength):
    """Count Dyck paths by enumerating every up/down word."""
    count = 0
    for word in product((1, -1), repeat=2 * semilength):
        h = 0
        for step in word:
            h += step
            if h < 0:
                break
        else:
            count += h == 0
    return count


def motzkin2_paths(length):
    """Paths from height 0 to height 0 using (1,1), (1,-1), (1,0), (2,0), never below 0."""
    steps = ((1, 1), (1, -1), (1, 0), (2, 0))

    @lru_cache(maxsize=None)
    def walk(x, h):
        if x == length:
            return int(h == 0)
        return sum(walk(x + dx, h + dy) for dx, dy in steps if x + dx <= length and h + dy >= 0)

    return walk(0, 0)


def involutions(n):
    """Number of involutions of {1..n}, counted by fixing where n goes."""
    f = [1, 1]
    for m in range(2, n + 1):
        f.append(f[m - 1] + (m - 1) * f[m - 2])
    return f[: n + 1]


def involutions_by_enumeration(n):
    """Count permutations p with p(p(i)) = i by generating them all."""
    from itertools import permutations

    return sum(all(p[p[i]] == i for i in range(n)) for p in permutations(range(n)))


def annihilating_tree_totals(axiom, table, depth):
    """Explicit node-by-node tree where marked nodes kill same-label plain nodes.

    ``table`` maps an unmarked label key to a list of (jump, label key, marked)
    triples, one entry per son.  Label keys are arbitrary hashables.  A node
    is (key, sign).  On each level, every marked node kills one plain node of
    the same key; both disappear together with their would-be subtrees.  The
    surviving nodes then produce their sons, marked nodes producing mirrored
    (sign-flipped) sons.
    """
    pending = defaultdict(list)
    pending[0].append((axiom[0], axiom[1]))
    out = []
    for n in range(depth + 1):
        nodes = pending.pop(n, [])
        plain = defaultdict(list)
        marked = defaultdict(list)
        for key, sign in nodes:
            (plain if sign > 0 else marked)[key].append((key, sign))
        survivors = []
        for key in set(plain) | set(marked):
            p, m = len(plain[key]), len(marked[key])
            kill = min(p, m)
            survivors += plain[key][kill:] + marked[key][kill:]
        out.append(sum(sign for _, sign in survivors))
        for key, sign in survivors:
            for jump, son, son_marked in table.get(key, ()):
                if n + jump <= depth:
                    pending[n + jump].append((son, -sign if son_marked else sign))
    return out

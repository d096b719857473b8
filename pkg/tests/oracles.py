"""Brute-force reference computations.

These work straight from the definitions on raw grids (lists of lists of
ints or Fractions, reduced mod p when ``p`` is given) and share no code
with the package's elimination, Pfaffian or search routines.
"""

from fractions import Fraction
from itertools import combinations, permutations, product


def _reduce(x, p):
    return x % p if p else x


def perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def leibniz_det(rows, p=None):
    n = len(rows)
    total = 0
    for perm in permutations(range(n)):
        term = perm_sign(perm)
        for i in range(n):
            term *= rows[i][perm[i]]
            if term == 0:
                break
        total += term
    return _reduce(total, p)


def brute_rank(rows, p=None):
    """Largest k with a nonzero k x k minor."""
    if not rows or not rows[0]:
        return 0
    nr, nc = len(rows), len(rows[0])
    for k in range(min(nr, nc), 0, -1):
        for rs in combinations(range(nr), k):
            for cs in combinations(range(nc), k):
                if leibniz_det([[rows[i][j] for j in cs] for i in rs], p) != 0:
                    return k
    return 0


def brute_sqrt(x, p):
    return sorted(r for r in range(p) if r * r % p == x % p)


def matching_pfaffian(rows, p=None):
    """Sum over perfect matchings, sign from the crossing count."""
    n = len(rows)
    if n % 2:
        return 0

    def matchings(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for t in range(len(rest)):
            for m in matchings(rest[:t] + rest[t + 1:]):
                yield [(first, rest[t])] + m

    total = 0
    for m in matchings(list(range(n))):
        crossings = sum(
            1 for (a, b), (c, d) in combinations(m, 2) if a < c < b < d or c < a < d < b
        )
        term = -1 if crossings % 2 else 1
        for a, b in m:
            term *= rows[a][b]
        total += term
    return _reduce(total, p)


def clan_by_definition(rows, X):
    n = len(rows)
    X = set(X)
    for x in range(n):
        if x in X:
            continue
        for i in X:
            for j in X:
                if rows[x][i] != rows[x][j] or rows[i][x] != rows[j][x]:
                    return False
    return True


def hl_clan_by_minors(rows, X, p=None):
    """Every 2x2 minor of both off-diagonal blocks vanishes."""
    n = len(rows)
    Y = [y for y in range(n) if y not in set(X)]
    X = sorted(X)
    for r1, r2 in combinations(X, 2):
        for c1, c2 in combinations(Y, 2):
            if _reduce(rows[r1][c1] * rows[r2][c2] - rows[r1][c2] * rows[r2][c1], p) != 0:
                return False
            if _reduce(rows[c1][r1] * rows[c2][r2] - rows[c1][r2] * rows[c2][r1], p) != 0:
                return False
    return True


def brute_diag_similar(a_rows, b_rows, p=None):
    """All (signs, transposed) with b = DAD (or b^t = DAD), by trying every sign vector."""
    n = len(a_rows)
    found = []
    for signs in product((1, -1), repeat=n):
        for transposed in (False, True):
            ok = True
            for i in range(n):
                for j in range(n):
                    b = b_rows[j][i] if transposed else b_rows[i][j]
                    if _reduce(signs[i] * signs[j] * a_rows[i][j] - b, p) != 0:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                found.append((signs, transposed))
    return found


def brute_separable(rows):
    n = len(rows)
    for size in range(1, n):
        for X in combinations(range(n), size):
            if clan_by_definition(rows, X) and clan_by_definition(rows, set(range(n)) - set(X)):
                return True
    return False


def to_fraction_grid(rows):
    return [[Fraction(x) for x in r] for r in rows]

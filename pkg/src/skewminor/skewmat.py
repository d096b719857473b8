"""Labeled square matrices over an exact field.

Rows and columns are indexed by an ordered tuple of string labels.  Label
sets passed to the functions below may be any iterable of labels; ints are
accepted and converted with ``str``.  Subsets are also handled internally as
bitmasks over the label order (bit i <-> ``labels[i]``).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import DomainError, InvariantError, LabelError, SizeLimitError
from .exactfield import QQ, FieldElement, FieldSpec, Raw

INFINITY = "∞"
# Memoised first-row expansion touches at most 2^n subsets.
PFAFFIAN_MAX_ORDER = 24


def _label(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    raise LabelError(f"labels must be strings or ints, got {x!r}")


@dataclass(frozen=True, eq=False)
class LabeledMatrix:
    """Square matrix with raw field entries addressed by label pairs."""

    spec: FieldSpec
    labels: tuple[str, ...]
    rows: tuple[tuple[Raw, ...], ...]

    def __post_init__(self):
        labels = tuple(_label(x) for x in self.labels)
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate labels in {labels}")
        n = len(labels)
        if len(self.rows) != n or any(len(r) != n for r in self.rows):
            raise InvariantError(f"expected a {n}x{n} grid matching the labels")
        rows = tuple(tuple(self.spec.coerce(x) for x in r) for r in self.rows)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "rows", rows)
        self._check()

    def _check(self):
        pass

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], spec: FieldSpec = QQ, labels: Iterable | None = None):
        rows = [list(r) for r in rows]
        if labels is None:
            labels = [str(i + 1) for i in range(len(rows))]
        return cls(spec, tuple(labels), tuple(tuple(r) for r in rows))

    @classmethod
    def from_upper(cls, n: int, upper: dict, spec: FieldSpec = QQ, labels: Iterable | None = None):
        """Skew-symmetric matrix from ``{(i, j): a_ij}`` with 1-based i < j."""
        grid = [[0] * n for _ in range(n)]
        for (i, j), v in upper.items():
            v = spec.coerce(v)
            grid[i - 1][j - 1] = v
            grid[j - 1][i - 1] = spec.neg(v)
        return SkewMatrix.from_rows(grid, spec, labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, LabeledMatrix):
            return NotImplemented
        return self.spec == other.spec and self.labels == other.labels and self.rows == other.rows

    def __hash__(self):
        return hash((self.spec, self.labels, self.rows))

    def index(self, label) -> int:
        try:
            return self.labels.index(_label(label))
        except ValueError:
            raise LabelError(f"unknown label {label!r}") from None

    def mask(self, X: Iterable) -> int:
        if isinstance(X, str):
            raise LabelError("pass a collection of labels, not a single string")
        m = 0
        for x in X:
            m |= 1 << self.index(x)
        return m

    def subset(self, mask: int) -> tuple[str, ...]:
        return tuple(lab for i, lab in enumerate(self.labels) if mask >> i & 1)

    def raw(self, i, j) -> Raw:
        return self.rows[self.index(i)][self.index(j)]

    def __getitem__(self, key) -> FieldElement:
        i, j = key
        return FieldElement(self.spec, self.raw(i, j))

    def transpose(self) -> LabeledMatrix:
        return type(self)(self.spec, self.labels, tuple(zip(*self.rows)) if self.rows else ())

    def is_skew(self) -> bool:
        neg = self.spec.neg
        return all(
            self.rows[i][j] == neg(self.rows[j][i]) for i in range(self.n) for j in range(i, self.n)
        )

    def is_symmetric(self) -> bool:
        return all(self.rows[i][j] == self.rows[j][i] for i in range(self.n) for j in range(i))

    def density(self) -> DensityReport:
        for i in range(self.n):
            for j in range(self.n):
                if i != j and self.rows[i][j] == 0:
                    return DensityReport(False, (self.labels[i], self.labels[j]))
        return DensityReport(True, None)

    def is_dense(self) -> bool:
        return self.density().dense

    def restrict(self, X: Iterable) -> LabeledMatrix:
        """Principal submatrix A[X]."""
        return submatrix(self, X, X)

    def __neg__(self):
        neg = self.spec.neg
        return type(self)(self.spec, self.labels, tuple(tuple(neg(x) for x in r) for r in self.rows))

    def __str__(self):
        cells = [[self.spec.format(x) for x in r] for r in self.rows]
        w = max((len(c) for r in cells for c in r), default=1)
        return "\n".join(" ".join(c.rjust(w) for c in r) for r in cells)

    def __repr__(self):
        return f"{type(self).__name__}({self.spec}, labels={list(self.labels)})"

    # -- JSON ----------------------------------------------------------------

    def to_json(self) -> dict:
        obj = {
            "field": self.spec.to_json(),
            "labels": list(self.labels),
            "rows": [[self.spec.format(x) for x in r] for r in self.rows],
        }
        if isinstance(self, SkewMatrix):
            obj["skew"] = True
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"


class SkewMatrix(LabeledMatrix):
    """A LabeledMatrix with zero diagonal and a_ij = -a_ji."""

    def _check(self):
        neg = self.spec.neg
        for i in range(self.n):
            for j in range(i, self.n):
                if self.rows[i][j] != neg(self.rows[j][i]):
                    raise InvariantError(
                        f"not skew-symmetric at ({self.labels[i]}, {self.labels[j]})"
                    )


@dataclass(frozen=True)
class DensityReport:
    dense: bool
    zero_pair: tuple[str, str] | None


def as_skew(A: LabeledMatrix) -> SkewMatrix:
    """Return A as a SkewMatrix, raising InvariantError if it is not skew."""
    if isinstance(A, SkewMatrix):
        return A
    return SkewMatrix(A.spec, A.labels, A.rows)


def matrix_from_json(obj) -> LabeledMatrix:
    """Decode the matrix file format; returns a SkewMatrix whenever the entries are skew."""
    if not isinstance(obj, dict):
        raise DomainError("matrix file must hold a JSON object")
    for key in ("field", "labels", "rows"):
        if key not in obj:
            raise DomainError(f"matrix file lacks {key!r}")
    spec = FieldSpec.from_json(obj["field"])
    labels, rows = obj["labels"], obj["rows"]
    if not isinstance(labels, list) or not isinstance(rows, list):
        raise DomainError("'labels' and 'rows' must be lists")
    if any(not isinstance(r, list) for r in rows):
        raise InvariantError("every row must be a list")
    n = len(labels)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InvariantError(f"grid is not {n}x{n}")
    parsed = [[spec.parse(x) if isinstance(x, str) else spec.coerce(x) for x in r] for r in rows]
    A = LabeledMatrix(spec, tuple(labels), tuple(tuple(r) for r in parsed))
    if obj.get("skew"):
        return as_skew(A)
    return as_skew(A) if A.is_skew() else A


def load_matrix(path) -> LabeledMatrix:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


# -- elimination kernels (raw values) ----------------------------------------


def _det_mod(m: list[list[int]], p: int) -> int:
    n = len(m)
    det = 1
    for c in range(n):
        piv = None
        for r in range(c, n):
            if m[r][0]:
                piv = r
                break
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        pr = m[c]
        pv = pr[0]
        det = det * pv % p
        inv = pow(pv, -1, p)
        tail = pr[1:]
        for r in range(c + 1, n):
            row = m[r]
            f = row[0]
            if f:
                f = f * inv % p
                m[r] = [(x - f * y) % p for x, y in zip(row[1:], tail)]
            else:
                m[r] = row[1:]
    return det % p


def _det_bareiss(m: list[list[int]]) -> int:
    """Fraction-free elimination; every division below is exact."""
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            f = ri[k]
            ri[k + 1:] = [(x * pk - f * y) // prev for x, y in zip(ri[k + 1:], rk[k + 1:])]
        prev = pk
    return sign * m[n - 1][n - 1]


def _integer_lift(rows) -> tuple[list[list[int]], int]:
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, x.denominator)
    return [[int(x * den) for x in r] for r in rows], den


def _det_raw(spec: FieldSpec, rows) -> Raw:
    if spec.is_prime_field:
        return _det_mod([list(r) for r in rows], spec.p)
    ints, den = _integer_lift(rows)
    return Fraction(_det_bareiss(ints), den ** len(rows))


def _rank_raw(spec: FieldSpec, rows) -> int:
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return 0
    nr, nc = len(m), len(m[0])
    rank = 0
    for c in range(nc):
        piv = next((r for r in range(rank, nr) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = spec.inv(m[rank][c])
        for r in range(rank + 1, nr):
            if m[r][c] != 0:
                f = spec.mul(m[r][c], inv)
                m[r] = [spec.sub(x, spec.mul(f, y)) for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == nr:
            break
    return rank


def rank_at_most_one(spec: FieldSpec, rows) -> bool:
    """True iff the raw grid has rank <= 1; cheaper than a full rank."""
    pivot = None
    for r in rows:
        for c, x in enumerate(r):
            if x != 0:
                pivot = (r, c, x)
                break
        if pivot:
            break
    if pivot is None:
        return True
    pr, pc, pv = pivot
    mul = spec.mul
    for r in rows:
        rc = r[pc]
        for c, x in enumerate(r):
            if mul(x, pv) != mul(rc, pr[c]):
                return False
    return True


class PrincipalMinorKernel:
    """Callable mask -> det(A[mask]) sharing one integer lift across calls.

    Picklable so subset sweeps can be fanned out to worker processes.
    """

    def __init__(self, A: LabeledMatrix):
        self.spec = A.spec
        self.n = A.n
        self.skew = A.is_skew()
        if A.spec.is_prime_field:
            self.grid = [list(r) for r in A.rows]
            self.den = 1
        else:
            self.grid, self.den = _integer_lift(A.rows)

    def __call__(self, mask: int) -> Raw:
        idx = [i for i in range(self.n) if mask >> i & 1]
        k = len(idx)
        if self.skew and k % 2:
            return self.spec.zero
        g = self.grid
        sub = [[g[i][j] for j in idx] for i in idx]
        if self.spec.is_prime_field:
            return _det_mod(sub, self.spec.p)
        return Fraction(_det_bareiss(sub), self.den ** k)


# -- public operations ---------------------------------------------------------


def submatrix(A: LabeledMatrix, X: Iterable, Y: Iterable) -> LabeledMatrix:
    """A[X, Y] with rows X and columns Y, both kept in A's label order."""
    xs = sorted({A.index(x) for x in X})
    ys = sorted({A.index(y) for y in Y})
    if not xs or not ys:
        raise LabelError("submatrix needs nonempty row and column sets")
    rows = tuple(tuple(A.rows[i][j] for j in ys) for i in xs)
    if xs == ys:
        cls = SkewMatrix if isinstance(A, SkewMatrix) else LabeledMatrix
        return cls(A.spec, tuple(A.labels[i] for i in xs), rows)
    return RectMatrix(A.spec, tuple(A.labels[i] for i in xs), tuple(A.labels[j] for j in ys), rows)


@dataclass(frozen=True)
class RectMatrix:
    """Off-diagonal block A[X, Y]; only rank is asked of it."""

    spec: FieldSpec
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    rows: tuple[tuple[Raw, ...], ...]

    def __getitem__(self, key) -> FieldElement:
        i, j = key
        return FieldElement(self.spec, self.rows[self.row_labels.index(_label(i))][self.col_labels.index(_label(j))])


def block(A: LabeledMatrix, xmask: int, ymask: int) -> list[list[Raw]]:
    """Raw rows of A[X, Y] for bitmasks X, Y."""
    xs = [i for i in range(A.n) if xmask >> i & 1]
    ys = [j for j in range(A.n) if ymask >> j & 1]
    return [[A.rows[i][j] for j in ys] for i in xs]


def determinant(A: LabeledMatrix) -> FieldElement:
    """Exact determinant; the empty matrix has determinant 1."""
    return FieldElement(A.spec, _det_raw(A.spec, A.rows))


def rank(A) -> int:
    """Exact rank of a LabeledMatrix, a RectMatrix or a raw grid (with spec attached)."""
    return _rank_raw(A.spec, A.rows)


def pfaffian(A: LabeledMatrix) -> FieldElement:
    """Pfaffian by first-row expansion, memoised on the remaining index set.

    pf([[0, a], [-a, 0]]) = a.  Odd order gives 0 with a warning.
    """
    A = as_skew(A)
    n = A.n
    spec = A.spec
    if n % 2:
        warnings.warn("Pfaffian of an odd-order matrix is 0 by convention", stacklevel=2)
        return FieldElement(spec, spec.zero)
    if n > PFAFFIAN_MAX_ORDER:
        raise SizeLimitError(f"Pfaffian expansion limited to order {PFAFFIAN_MAX_ORDER}")
    g = A.rows
    memo: dict[int, Raw] = {0: spec.one}

    def pf(mask: int) -> Raw:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = spec.zero
        sign = 1
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            a = g[i][j]
            if a != 0:
                term = spec.mul(a, pf(rest & ~(1 << j)))
                total = spec.add(total, term) if sign > 0 else spec.sub(total, term)
            sign = -sign
        memo[mask] = total
        return total

    return FieldElement(spec, pf((1 << n) - 1))


def extend_infinity(A: LabeledMatrix, label: str = INFINITY) -> SkewMatrix:
    """A^inf: append index ``label`` with a row of 1s and a column of -1s."""
    A = as_skew(A)
    if label in A.labels:
        raise LabelError(f"label {label!r} already present")
    spec = A.spec
    one, mone = spec.one, spec.neg(spec.one)
    rows = [list(r) + [mone] for r in A.rows]
    rows.append([one] * A.n + [spec.zero])
    return SkewMatrix(spec, A.labels + (label,), tuple(tuple(r) for r in rows))


def flip_on_set(A: LabeledMatrix, X: Iterable) -> SkewMatrix:
    """Negate every entry a_ij with both i and j in X."""
    A = as_skew(A)
    m = A.mask(X)
    neg = A.spec.neg
    rows = tuple(
        tuple(neg(x) if (m >> i & 1 and m >> j & 1) else x for j, x in enumerate(r))
        for i, r in enumerate(A.rows)
    )
    return SkewMatrix(A.spec, A.labels, rows)


def apply_witness(A: LabeledMatrix, W) -> LabeledMatrix:
    """DAD with D = diag(W.signs), transposed afterwards if W.transposed."""
    signs = W.signs
    missing = [x for x in A.labels if x not in signs]
    if missing:
        raise LabelError(f"witness has no sign for {missing}")
    d = [signs[x] for x in A.labels]
    neg = A.spec.neg
    rows = [[x if d[i] == d[j] else neg(x) for j, x in enumerate(r)] for i, r in enumerate(A.rows)]
    if W.transposed:
        rows = [list(c) for c in zip(*rows)]
    return type(A)(A.spec, A.labels, tuple(tuple(r) for r in rows))


def diagonal_congruence(A: LabeledMatrix, diag: Sequence) -> LabeledMatrix:
    """DAD for an arbitrary diagonal D given as a sequence in label order."""
    spec = A.spec
    d = [spec.coerce(x) for x in diag]
    if len(d) != A.n:
        raise DomainError("diagonal length does not match the matrix")
    mul = spec.mul
    rows = tuple(tuple(mul(mul(d[i], x), d[j]) for j, x in enumerate(r)) for i, r in enumerate(A.rows))
    return type(A)(spec, A.labels, rows)


# -- generators ----------------------------------------------------------------


class SplitMix64:
    """Steele/Lea/Flood SplitMix64; the only randomness source for generators."""

    GOLDEN = 0x9E3779B97F4A7C15
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.state + self.GOLDEN) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection, no modulo bias."""
        limit = (1 << 64) - (1 << 64) % n
        while True:
            v = self.next()
            if v < limit:
                return v % n

    def sign(self) -> int:
        return 1 if self.below(2) else -1


# Random rational entries are integers in [-RATIONAL_BOUND, RATIONAL_BOUND].
RATIONAL_BOUND = 9


def _draw(rng: SplitMix64, spec: FieldSpec, nonzero: bool) -> Raw:
    while True:
        if spec.is_prime_field:
            v = rng.below(spec.p)
        else:
            v = Fraction(rng.below(2 * RATIONAL_BOUND + 1) - RATIONAL_BOUND)
        if v != 0 or not nonzero:
            return v


def _labels(n: int) -> tuple[str, ...]:
    return tuple(str(i + 1) for i in range(n))


def _skew_from_draws(spec: FieldSpec, n: int, rng: SplitMix64, nonzero: bool, labels=None) -> SkewMatrix:
    grid = [[spec.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = _draw(rng, spec, nonzero)
            grid[i][j] = v
            grid[j][i] = spec.neg(v)
    return SkewMatrix(spec, tuple(labels) if labels else _labels(n), tuple(map(tuple, grid)))


def gen_random_dense(spec: FieldSpec, n: int, seed: int) -> SkewMatrix:
    """Dense skew matrix, upper entries drawn row-major from SplitMix64(seed).

    GF(p) entries are uniform on 1..p-1; rational entries uniform on the
    nonzero integers in [-9, 9].  Zero draws are rejected and redrawn.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    return _skew_from_draws(spec, n, SplitMix64(seed), nonzero=True)


def gen_random_skew(spec: FieldSpec, n: int, seed: int) -> SkewMatrix:
    """Like gen_random_dense but zero entries are allowed."""
    return _skew_from_draws(spec, n, SplitMix64(seed), nonzero=False)


def gen_random_signs(labels: Sequence[str], seed: int) -> dict[str, int]:
    rng = SplitMix64(seed)
    return {x: rng.sign() for x in labels}


def gen_skew_cycle(n: int, variant: str, spec: FieldSpec = QQ) -> SkewMatrix:
    """The skew cycle pair: unit superdiagonal, corner a_n1 = 1 (A) or -1 (B)."""
    if n < 6 or n % 2:
        raise DomainError("skew cycle needs an even n >= 6")
    if variant not in ("A", "B"):
        raise DomainError("variant must be 'A' or 'B'")
    up = {(i, i + 1): 1 for i in range(1, n)}
    up[(1, n)] = -1 if variant == "A" else 1
    return LabeledMatrix.from_upper(n, up, spec)


def gen_sym_cycle(n: int, variant: str, spec: FieldSpec = QQ) -> LabeledMatrix:
    """Symmetric n-cycle adjacency; the closing edge is +1 (A) or -1 (B)."""
    if n < 4:
        raise DomainError("symmetric cycle needs n >= 4")
    if variant not in ("A", "B"):
        raise DomainError("variant must be 'A' or 'B'")
    grid = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        grid[i][i + 1] = grid[i + 1][i] = 1
    corner = 1 if variant == "A" else -1
    grid[0][n - 1] = grid[n - 1][0] = corner
    return LabeledMatrix.from_rows(grid, spec)


def gen_planted_hl_clan(spec: FieldSpec, n: int, X: Iterable, seed: int) -> SkewMatrix:
    """Dense skew matrix in which X is an HL-clan.

    The block A[X, V\\X] is the outer product of two random nonzero vectors
    (rank one); everything else is dense random.
    """
    labels = _labels(n)
    rng = SplitMix64(seed)
    xset = {_label(x) for x in X}
    if not xset <= set(labels):
        raise LabelError(f"{sorted(xset)} is not a subset of 1..{n}")
    inside = [i for i, lab in enumerate(labels) if lab in xset]
    outside = [i for i, lab in enumerate(labels) if lab not in xset]
    u = {i: _draw(rng, spec, True) for i in inside}
    v = {j: _draw(rng, spec, True) for j in outside}
    grid = [[spec.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if i in u and j in v:
                val = spec.mul(u[i], v[j])
            elif j in u and i in v:
                val = spec.neg(spec.mul(u[j], v[i]))
            else:
                val = _draw(rng, spec, True)
            grid[i][j] = val
            grid[j][i] = spec.neg(val)
    return SkewMatrix(spec, labels, tuple(map(tuple, grid)))


def is_irreducible(A: LabeledMatrix) -> bool:
    """No proper X with A[X, V\\X] = 0 or A[V\\X, X] = 0 (strong connectivity)."""
    n = A.n
    if n <= 1:
        return True

    def reach(forward: bool) -> int:
        seen, stack = 1, [0]
        while stack:
            i = stack.pop()
            for j in range(n):
                x = A.rows[i][j] if forward else A.rows[j][i]
                if x != 0 and not seen >> j & 1:
                    seen |= 1 << j
                    stack.append(j)
        return seen

    full = (1 << n) - 1
    return reach(True) == full and reach(False) == full

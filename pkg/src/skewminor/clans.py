"""Clans, HL-clans and separability.

A clan X is a set that every outside index sees uniformly: a_xi = a_xj and
a_ix = a_jx for x outside X and i, j inside.  An HL-clan only asks that both
off-diagonal blocks A[X, V\\X] and A[V\\X, X] have rank at most one.

Decomposition searches are exhaustive over subsets containing the first
label (complements cover the rest), so every report is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .errors import PreconditionError, SizeLimitError, VerificationError
from .exactfield import FieldElement
from .skewmat import LabeledMatrix, as_skew, block, rank_at_most_one

SWEEP_MAX_ORDER = 22

CLAN = "clan"
HL_CLAN = "hl-clan"
CLAN_PARTITION = "clan-partition"
INDECOMPOSABLE = "indecomposable"
HL_INDECOMPOSABLE = "hl-indecomposable"
SEPARABLE = "separable"
INSEPARABLE = "inseparable"


@dataclass(frozen=True)
class ClanReport:
    kind: str
    subset: tuple[str, ...] | None = None
    partition: tuple[tuple[str, ...], tuple[str, ...]] | None = None
    constant: FieldElement | None = None

    @property
    def found(self) -> bool:
        return self.subset is not None or self.partition is not None

    def to_json(self) -> dict:
        obj: dict = {"kind": self.kind}
        if self.subset is not None:
            obj["subset"] = list(self.subset)
        if self.partition is not None:
            obj["partition"] = [list(p) for p in self.partition]
        if self.constant is not None:
            obj["constant"] = str(self.constant)
        return obj


def _full(n: int) -> int:
    return (1 << n) - 1


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _clan_mask(rows, n: int, mask: int) -> bool:
    members = _bits(mask)
    if len(members) <= 1:
        return True
    first, rest = members[0], members[1:]
    for x in range(n):
        if mask >> x & 1:
            continue
        rx = rows[x]
        out_val = rx[first]
        in_val = rows[first][x]
        for i in rest:
            if rx[i] != out_val or rows[i][x] != in_val:
                return False
    return True


def _distinguishes(rows, x: int, members: list[int]) -> bool:
    first = members[0]
    rx = rows[x]
    return any(rx[i] != rx[first] or rows[i][x] != rows[first][x] for i in members[1:])


def _closure_mask(rows, n: int, mask: int) -> int:
    changed = True
    while changed:
        changed = False
        members = _bits(mask)
        for x in range(n):
            if not mask >> x & 1 and _distinguishes(rows, x, members):
                mask |= 1 << x
                members.append(x)
                changed = True
    return mask


def _hl_clan_mask(A: LabeledMatrix, mask: int, skew: bool) -> bool:
    comp = _full(A.n) & ~mask
    if mask == 0 or comp == 0:
        return True
    if not rank_at_most_one(A.spec, block(A, mask, comp)):
        return False
    return skew or rank_at_most_one(A.spec, block(A, comp, mask))


def _masks_with_first(n: int, lo: int, hi: int) -> Iterator[int]:
    """Masks containing bit 0 with lo <= popcount <= hi, in (size, lex) order."""
    for size in range(max(lo, 1), hi + 1):
        for combo in combinations(range(1, n), size - 1):
            m = 1
            for i in combo:
                m |= 1 << i
            yield m


def _check_size(A: LabeledMatrix):
    if A.n > SWEEP_MAX_ORDER:
        raise SizeLimitError(f"exhaustive subset sweep refused above n = {SWEEP_MAX_ORDER}")


def is_trivial_clan(A: LabeledMatrix, X: Iterable) -> bool:
    """Empty set, singletons and V."""
    k = bin(A.mask(X)).count("1")
    return k <= 1 or k == A.n


def is_trivial_hl_clan(A: LabeledMatrix, X: Iterable) -> bool:
    """Trivial clans plus the complements of singletons."""
    k = bin(A.mask(X)).count("1")
    return k <= 1 or k >= A.n - 1


def is_clan(A: LabeledMatrix, X: Iterable) -> bool:
    return _clan_mask(A.rows, A.n, A.mask(X))


def clan_closure(A: LabeledMatrix, S: Iterable) -> tuple[str, ...]:
    """Smallest clan containing S.

    Any outside index that tells two members apart must belong to every clan
    containing S, so adding such indices until none remain gives the minimum.
    """
    m = A.mask(S)
    if m == 0:
        raise PreconditionError("closure of the empty set is undefined")
    return A.subset(_closure_mask(A.rows, A.n, m))


def iter_clans(A: LabeledMatrix) -> Iterator[tuple[str, ...]]:
    """Every clan of A, by brute force over all 2^n subsets."""
    _check_size(A)
    for size in range(A.n + 1):
        for combo in combinations(range(A.n), size):
            m = sum(1 << i for i in combo)
            if _clan_mask(A.rows, A.n, m):
                yield A.subset(m)


def find_nontrivial_clan(A: LabeledMatrix) -> ClanReport:
    """First pair closure that stays proper, else an indecomposability report."""
    full = _full(A.n)
    for i, j in combinations(range(A.n), 2):
        c = _closure_mask(A.rows, A.n, (1 << i) | (1 << j))
        if c != full:
            return ClanReport(CLAN, subset=A.subset(c))
    return ClanReport(INDECOMPOSABLE)


def is_decomposable(A: LabeledMatrix) -> bool:
    return find_nontrivial_clan(A).kind == CLAN


def is_hl_clan(A: LabeledMatrix, X: Iterable) -> bool:
    """Both A[X, V\\X] and A[V\\X, X] have rank <= 1 (one side suffices for skew A)."""
    return _hl_clan_mask(A, A.mask(X), A.is_skew())


def hl_indecomposable(A: LabeledMatrix) -> ClanReport:
    """Search for an HL-clan X with 2 <= |X| <= n-2 containing the first label."""
    _check_size(A)
    n = A.n
    skew = A.is_skew()
    for m in _masks_with_first(n, 2, n - 2):
        if _hl_clan_mask(A, m, skew):
            return ClanReport(HL_CLAN, subset=A.subset(m))
    return ClanReport(HL_INDECOMPOSABLE)


def is_hl_indecomposable(A: LabeledMatrix) -> bool:
    return hl_indecomposable(A).kind == HL_INDECOMPOSABLE


def is_separable(A: LabeledMatrix) -> ClanReport:
    """Look for a clan X (containing the first label) whose complement is a clan.

    Partitions into a singleton and its complement count.
    """
    A = as_skew(A)
    _check_size(A)
    n = A.n
    if n < 2:
        return ClanReport(INSEPARABLE)
    full = _full(n)
    for m in _masks_with_first(n, 1, n - 1):
        comp = full & ~m
        if _clan_mask(A.rows, n, m) and _clan_mask(A.rows, n, comp):
            x = _bits(m)[0]
            y = _bits(comp)[0]
            return ClanReport(
                SEPARABLE,
                partition=(A.subset(m), A.subset(comp)),
                constant=FieldElement(A.spec, A.rows[x][y]),
            )
    return ClanReport(INSEPARABLE)


def separable(A: LabeledMatrix) -> bool:
    return is_separable(A).kind == SEPARABLE


def peel_inseparable(A: LabeledMatrix) -> str:
    """A label x (first in label order) with A[V\\{x}] still inseparable."""
    A = as_skew(A)
    if A.n < 5:
        raise PreconditionError("need at least 5 labels")
    if separable(A):
        raise PreconditionError("matrix is separable")
    for x in A.labels:
        rest = [y for y in A.labels if y != x]
        if not separable(A.restrict(rest)):
            return x
    raise VerificationError("no label leaves an inseparable remainder")

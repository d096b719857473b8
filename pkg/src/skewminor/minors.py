"""Principal-minor tables and (<=k)-HL-equivalence.

Subsets are enumerated by size, then lexicographically by label position;
this order fixes which mismatch :func:`hl_equivalent` reports and the order
of entries in MinorTable files.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .errors import DomainError, SizeLimitError
from .exactfield import FieldElement, FieldSpec, Raw
from .skewmat import LabeledMatrix, PrincipalMinorKernel, _label, as_skew

THREADS_ENV = "SKEWMINOR_THREADS"
PU_MAX_ORDER = 20
_CHUNK = 4096


def iter_masks(n: int, k: int) -> Iterator[int]:
    """Bitmasks of all subsets of range(n) with size <= k, in (size, lex) order."""
    for size in range(min(k, n) + 1):
        for combo in combinations(range(n), size):
            m = 0
            for i in combo:
                m |= 1 << i
            yield m


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _eval_chunk(kernel: PrincipalMinorKernel, masks: list[int]) -> list[Raw]:
    return [kernel(m) for m in masks]


def _sweep(kernel: PrincipalMinorKernel, masks: list[int], workers: int) -> list[Raw]:
    if workers <= 1 or len(masks) < 2 * _CHUNK:
        return [kernel(m) for m in masks]
    chunks = [masks[i:i + _CHUNK] for i in range(0, len(masks), _CHUNK)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_eval_chunk, [kernel] * len(chunks), chunks)
        return [v for part in parts for v in part]


@dataclass(frozen=True, eq=False)
class MinorTable:
    """det(A[X]) for every X with |X| <= max_order, keyed by bitmask."""

    spec: FieldSpec
    labels: tuple[str, ...]
    max_order: int
    entries: dict[int, Raw] = field(repr=False)

    def __post_init__(self):
        n = len(self.labels)
        if not 0 <= self.max_order <= n:
            raise DomainError(f"max_order {self.max_order} outside 0..{n}")
        expected = list(iter_masks(n, self.max_order))
        if set(self.entries) != set(expected):
            raise DomainError("minor table is not total on subsets of size <= max_order")
        if self.entries[0] != self.spec.one:
            raise DomainError("the empty minor must be 1")
        ordered = {m: self.entries[m] for m in expected}
        object.__setattr__(self, "entries", ordered)

    def __eq__(self, other):
        if not isinstance(other, MinorTable):
            return NotImplemented
        return (self.spec, self.labels, self.max_order, list(self.entries.items())) == (
            other.spec, other.labels, other.max_order, list(other.entries.items()))

    def __len__(self):
        return len(self.entries)

    def mask(self, X) -> int:
        if isinstance(X, int):
            return X
        if isinstance(X, str):
            raise DomainError("pass a collection of labels, not a single string")
        m = 0
        for x in X:
            try:
                m |= 1 << self.labels.index(_label(x))
            except ValueError:
                raise DomainError(f"unknown label {x!r}") from None
        return m

    def subset(self, mask: int) -> tuple[str, ...]:
        return tuple(lab for i, lab in enumerate(self.labels) if mask >> i & 1)

    def raw(self, X) -> Raw:
        return self.entries[self.mask(X)]

    def __getitem__(self, X) -> FieldElement:
        return FieldElement(self.spec, self.raw(X))

    def items(self) -> Iterator[tuple[tuple[str, ...], FieldElement]]:
        for m, v in self.entries.items():
            yield self.subset(m), FieldElement(self.spec, v)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "max_order": self.max_order,
            "minors": [
                {"subset": list(self.subset(m)), "value": self.spec.format(v)}
                for m, v in self.entries.items()
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, obj, spec: FieldSpec) -> MinorTable:
        if not isinstance(obj, dict):
            raise DomainError("minor table must be a JSON object")
        try:
            labels = tuple(_label(x) for x in obj["labels"])
            k = obj["max_order"]
            rows = obj["minors"]
        except KeyError as exc:
            raise DomainError(f"minor table lacks {exc.args[0]!r}") from None
        if not isinstance(k, int) or isinstance(k, bool):
            raise DomainError("max_order must be an integer")
        entries: dict[int, Raw] = {}
        for row in rows:
            m = 0
            for x in row["subset"]:
                try:
                    m |= 1 << labels.index(_label(x))
                except ValueError:
                    raise DomainError(f"unknown label {x!r} in minor table") from None
            if m in entries:
                raise DomainError(f"subset {row['subset']} listed twice")
            v = row["value"]
            entries[m] = spec.parse(v) if isinstance(v, str) else spec.coerce(v)
        return cls(spec, labels, k, entries)


def load_minor_table(path, spec: FieldSpec) -> MinorTable:
    with open(path, encoding="utf-8") as fh:
        return MinorTable.from_json(json.load(fh), spec)


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    witness_subset: tuple[str, ...] | None
    order_checked: int
    mismatches: tuple[tuple[str, ...], ...] = ()

    def to_json(self) -> dict:
        obj = {
            "equivalent": self.equivalent,
            "witness_subset": list(self.witness_subset) if self.witness_subset is not None else None,
            "order_checked": self.order_checked,
        }
        if self.mismatches:
            obj["mismatches"] = [list(s) for s in self.mismatches]
        return obj


def principal_minors(A: LabeledMatrix, k: int | None = None, workers: int | None = None) -> MinorTable:
    """Table of det(A[X]) for all |X| <= k (default: every subset)."""
    n = A.n
    if k is None:
        k = n
    if not 0 <= k <= n:
        raise DomainError(f"order {k} outside 0..{n}")
    masks = list(iter_masks(n, k))
    values = _sweep(PrincipalMinorKernel(A), masks, workers or worker_count())
    return MinorTable(A.spec, A.labels, k, dict(zip(masks, values)))


def hl_equivalent(A: LabeledMatrix, B: LabeledMatrix, k: int, full: bool = False) -> EquivalenceVerdict:
    """Do A and B agree on every principal minor of order <= k?

    Stops at the first differing subset unless ``full`` is set, in which case
    every mismatch is listed in ``mismatches``.
    """
    if A.labels != B.labels:
        raise DomainError("matrices have different labels")
    if A.spec != B.spec:
        raise DomainError(f"matrices live in different fields ({A.spec} vs {B.spec})")
    if not 0 <= k <= A.n:
        raise DomainError(f"order {k} outside 0..{A.n}")
    ka, kb = PrincipalMinorKernel(A), PrincipalMinorKernel(B)
    bad = []
    for m in iter_masks(A.n, k):
        if ka(m) != kb(m):
            bad.append(A.subset(m))
            if not full:
                break
    return EquivalenceVerdict(not bad, bad[0] if bad else None, k, tuple(bad) if full else ())


def _sign_values(spec: FieldSpec) -> set:
    return {spec.zero, spec.one, spec.neg(spec.one)}


def is_principally_unimodular(A: LabeledMatrix) -> bool:
    """Every principal minor (all 2^n of them) lies in {-1, 0, 1}."""
    allowed = _sign_values(A.spec)
    if any(x not in allowed for r in A.rows for x in r):
        raise DomainError("entries must lie in {-1, 0, 1}")
    if A.n > PU_MAX_ORDER:
        raise SizeLimitError(f"exhaustive check refused above n = {PU_MAX_ORDER}")
    kernel = PrincipalMinorKernel(A)
    return all(kernel(m) in allowed for m in iter_masks(A.n, A.n))


def wesp_check(A: LabeledMatrix) -> bool:
    """For a dense skew sign matrix: is every order-4 principal minor equal to 1?"""
    A = as_skew(A)
    spec = A.spec
    signs = {spec.one, spec.neg(spec.one)}
    for i, r in enumerate(A.rows):
        for j, x in enumerate(r):
            if i != j and x not in signs:
                if x == 0:
                    raise DomainError(f"matrix is not dense at ({A.labels[i]}, {A.labels[j]})")
                raise DomainError("entries must lie in {-1, 0, 1}")
    kernel = PrincipalMinorKernel(A)
    one = spec.one
    for combo in combinations(range(A.n), 4):
        if kernel(sum(1 << i for i in combo)) != one:
            return False
    return True


def subsets_of(labels: Iterable[str], k: int) -> Iterator[tuple[str, ...]]:
    """Label tuples in the same (size, lex) order as the mask enumeration."""
    labels = tuple(labels)
    for size in range(min(k, len(labels)) + 1):
        yield from combinations(labels, size)

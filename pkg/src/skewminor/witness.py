"""Sign witnesses for dense skew-symmetric matrices with equal small minors.

For a dense, HL-indecomposable skew matrix A and any skew B sharing its
principal minors of order <= 4, there is a +-1 diagonal D with B = DAD or
B^t = DAD.  This module recovers that D, decides diagonal similarity up to
transposition directly, and rebuilds such matrices from a minor table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

from .clans import HL_CLAN, _clan_mask, hl_indecomposable
from .errors import (
    DensityError,
    DomainError,
    FieldError,
    HypothesisError,
    InconsistencyError,
    PreconditionError,
    VerificationError,
)
from .exactfield import FieldSpec
from .minors import MinorTable, hl_equivalent
from .skewmat import (
    LabeledMatrix,
    PrincipalMinorKernel,
    SkewMatrix,
    apply_witness,
    as_skew,
    extend_infinity,
)

__all__ = [
    "Witness",
    "SignPartition",
    "apply_witness",
    "equivalence_classes",
    "check_lopez",
    "recover_witness",
    "diag_similar_up_to_transposition",
    "reconstruct_from_minors",
]

E = "E"
D = "D"


@dataclass(frozen=True)
class Witness:
    """Claims B = DAD (or B^t = DAD when ``transposed``) with D = diag(signs)."""

    signs: Mapping[str, int]
    transposed: bool = False

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs.values()):
            raise DomainError("witness signs must be +1 or -1")
        object.__setattr__(self, "signs", dict(self.signs))

    def __hash__(self):
        return hash((tuple(sorted(self.signs.items())), self.transposed))

    @classmethod
    def identity(cls, labels) -> Witness:
        return cls({x: 1 for x in labels}, False)

    def negated(self) -> Witness:
        return Witness({x: -s for x, s in self.signs.items()}, self.transposed)

    def same_up_to_global_sign(self, other: Witness) -> bool:
        return self.transposed == other.transposed and other.signs in (self.signs, self.negated().signs)

    def to_json(self) -> dict:
        return {"transposed": self.transposed, "signs": dict(self.signs)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, obj) -> Witness:
        if not isinstance(obj, dict) or "signs" not in obj:
            raise DomainError("witness must be an object with 'signs'")
        signs = obj["signs"]
        if not isinstance(signs, dict):
            raise DomainError("'signs' must map labels to +1/-1")
        return cls({str(k): int(v) for k, v in signs.items()}, bool(obj.get("transposed", False)))


def load_witness(path) -> Witness:
    with open(path, encoding="utf-8") as fh:
        return Witness.from_json(json.load(fh))


@dataclass(frozen=True)
class SignPartition:
    mode: str
    classes: tuple[tuple[str, ...], ...]

    def class_of(self, x: str) -> tuple[str, ...]:
        return next(c for c in self.classes if x in c)


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # smaller root wins so classes come out keyed by their first label
            self.parent[max(rx, ry)] = min(rx, ry)


def _same_shape(A: LabeledMatrix, B: LabeledMatrix):
    if A.labels != B.labels:
        raise DomainError("matrices have different labels")
    if A.spec != B.spec:
        raise DomainError(f"matrices live in different fields ({A.spec} vs {B.spec})")


def _require_dense(A: LabeledMatrix, name: str = "A"):
    rep = A.density()
    if not rep.dense:
        raise DensityError(f"{name} is not dense: zero at {rep.zero_pair}", pair=rep.zero_pair)


def equivalence_classes(A: LabeledMatrix, B: LabeledMatrix, mode: str) -> SignPartition:
    """Components of {xy : a_xy = b_xy} (mode E) or {xy : a_xy = -b_xy} (mode D)."""
    if mode not in (E, D):
        raise DomainError("mode must be 'E' or 'D'")
    A, B = as_skew(A), as_skew(B)
    _same_shape(A, B)
    _require_dense(A)
    neg = A.spec.neg
    dsu = _DisjointSet(A.n)
    for i, j in combinations(range(A.n), 2):
        a, b = A.rows[i][j], B.rows[i][j]
        if b == a:
            if mode == E:
                dsu.union(i, j)
        elif b == neg(a):
            if mode == D:
                dsu.union(i, j)
        else:
            pair = (A.labels[i], A.labels[j])
            raise PreconditionError(f"b_xy is not +-a_xy at {pair}", pair=pair)
    groups: dict[int, list[str]] = {}
    for i, x in enumerate(A.labels):
        groups.setdefault(dsu.find(i), []).append(x)
    return SignPartition(mode, tuple(tuple(g) for _, g in sorted(groups.items())))


def check_lopez(A: LabeledMatrix, B: LabeledMatrix) -> bool:
    """Are all E- and D-classes clans of both A and B?

    Requires |V| >= 3 and A^inf, B^inf agreeing on principal minors of order <= 4.
    """
    A, B = as_skew(A), as_skew(B)
    _same_shape(A, B)
    if A.n < 3:
        raise PreconditionError("need at least 3 labels")
    _require_dense(A)
    _require_dense(B, "B")
    verdict = hl_equivalent(extend_infinity(A), extend_infinity(B), 4)
    if not verdict.equivalent:
        raise PreconditionError(
            f"A^inf and B^inf differ at {verdict.witness_subset}", subset=verdict.witness_subset
        )
    for mode in (E, D):
        for cls in equivalence_classes(A, B, mode).classes:
            m = A.mask(cls)
            if not (_clan_mask(A.rows, A.n, m) and _clan_mask(B.rows, B.n, m)):
                return False
    return True


def _first_mismatch(X: LabeledMatrix, Y: LabeledMatrix):
    for i in range(X.n):
        for j in range(X.n):
            if X.rows[i][j] != Y.rows[i][j]:
                return (X.labels[i], X.labels[j])
    return None


def recover_witness(
    A: LabeledMatrix,
    B: LabeledMatrix,
    verify_input: bool = False,
    check_hypotheses: bool = True,
) -> Witness:
    """Find signs D with B = DAD or B^t = DAD.

    The first label u anchors the gauge.  Rescaling by 1/a_uz and 1/b_uz
    makes row u all ones in both matrices; on the remaining labels the
    rescaled matrices must then coincide or be transposes, which fixes the
    transposition flag, and the signs are read off row u.  The result is
    always checked against B before being returned.
    """
    A, B = as_skew(A), as_skew(B)
    _same_shape(A, B)
    n = A.n
    if n < 4:
        raise PreconditionError("need at least 4 labels")
    _require_dense(A)
    if check_hypotheses:
        rep = hl_indecomposable(A)
        if rep.kind == HL_CLAN:
            raise HypothesisError(f"A is HL-decomposable: HL-clan {rep.subset}", subset=rep.subset)
    if verify_input:
        verdict = hl_equivalent(A, B, 4)
        if not verdict.equivalent:
            raise PreconditionError(
                f"principal minors differ at {verdict.witness_subset}", subset=verdict.witness_subset
            )

    spec = A.spec
    a, b = A.rows, B.rows
    neg, div, mul = spec.neg, spec.div, spec.mul
    for z in range(1, n):
        if b[0][z] != a[0][z] and b[0][z] != neg(a[0][z]):
            pair = (A.labels[0], A.labels[z])
            raise PreconditionError(f"b_uz is not +-a_uz at {pair}", pair=pair)

    def a_hat(j, k):
        return div(a[j][k], mul(a[0][j], a[0][k]))

    def b_hat(j, k):
        return div(b[j][k], mul(b[0][j], b[0][k]))

    transposed = None
    for j, k in combinations(range(1, n), 2):
        x, y = a_hat(j, k), b_hat(j, k)
        if y == x:
            branch = False
        elif y == neg(x):
            branch = True
        else:
            pair = (A.labels[j], A.labels[k])
            raise HypothesisError(f"normalized entries disagree beyond sign at {pair}", pair=pair)
        if transposed is None:
            transposed = branch
        elif branch != transposed:
            pair = (A.labels[j], A.labels[k])
            raise HypothesisError(f"mixed equal/transpose verdict at {pair}", pair=pair)

    signs = {A.labels[0]: 1}
    for z in range(1, n):
        same = b[0][z] == a[0][z]
        s = 1 if same else -1
        signs[A.labels[z]] = -s if transposed else s
    W = Witness(signs, bool(transposed))
    bad = _first_mismatch(apply_witness(A, W), B)
    if bad is not None:
        raise VerificationError(f"recovered witness fails at entry {bad}", entry=bad)
    return W


def diag_similar_up_to_transposition(A: LabeledMatrix, B: LabeledMatrix) -> Witness | None:
    """Witness that B = D^-1 A D or B^t = D^-1 A D for a nonsingular diagonal D, if any.

    With A dense, D is determined up to scale by the anchor row:
    d_z/d_u = b_uz/a_uz.  Skewness of both matrices forces these ratios into
    {+1, -1}, where D^-1 A D = DAD.
    """
    A, B = as_skew(A), as_skew(B)
    _same_shape(A, B)
    _require_dense(A)
    n = A.n
    for transposed in (False, True):
        target = B.transpose() if transposed else B
        t = target.rows
        signs = {}
        for z, lab in enumerate(A.labels):
            if z == 0:
                signs[lab] = 1
                continue
            r = A.spec.div(t[0][z], A.rows[0][z])
            if r == A.spec.one:
                signs[lab] = 1
            elif r == A.spec.neg(A.spec.one):
                signs[lab] = -1
            else:
                break
        if len(signs) < n:
            continue
        W = Witness(signs, transposed)
        if apply_witness(A, W) == B:
            return W
    return None


def _gauge_roots(T: MinorTable):
    spec = T.spec
    n = len(T.labels)
    roots = [[None] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        m = (1 << i) | (1 << j)
        v = T.entries[m]
        sub = T.subset(m)
        if v == 0:
            raise DensityError(f"order-2 minor at {sub} is zero", subset=sub)
        r = spec.canonical_sqrt(v)
        if r is None:
            raise FieldError(f"order-2 minor {spec.format(v)} at {sub} is not a square in {spec}", subset=sub)
        roots[i][j] = r
    return roots


def reconstruct_from_minors(
    T: MinorTable, spec: FieldSpec | None = None, limit: int | None = None
) -> list[SkewMatrix]:
    """All gauge-fixed skew matrices whose principal minors match T.

    Gauge: the first label u gets a_uz = canonical root of T({u, z}).  The
    remaining entries are +-(canonical root) with signs found by backtracking;
    each 4-set {u, j, k, l} pins one Pfaffian up to sign, which propagates a
    sign as soon as the other two in its triple are known.  Every candidate
    is then checked against the whole table.
    """
    if spec is not None and spec != T.spec:
        raise DomainError(f"table is over {T.spec}, not {spec}")
    spec = T.spec
    n = len(T.labels)
    if T.max_order < 4:
        raise DomainError("reconstruction needs minors up to order 4")
    for m, v in T.entries.items():
        if bin(m).count("1") % 2 and v != 0:
            sub = T.subset(m)
            raise InconsistencyError(f"odd-order minor at {sub} is nonzero", subset=sub)
    roots = _gauge_roots(T)
    mul, add, sub_ = spec.mul, spec.add, spec.sub

    pairs = list(combinations(range(1, n), 2))
    var_of = {p: v for v, p in enumerate(pairs)}
    # constraint: (mask, target, [(var, coefficient), ...]); pf = sum(sign_v * coef_v)
    constraints = []
    for j, k, l in combinations(range(1, n), 3):
        mask = 1 | (1 << j) | (1 << k) | (1 << l)
        terms = [
            (var_of[(k, l)], mul(roots[0][j], roots[k][l])),
            (var_of[(j, l)], spec.neg(mul(roots[0][k], roots[j][l]))),
            (var_of[(j, k)], mul(roots[0][l], roots[j][k])),
        ]
        constraints.append((mask, T.entries[mask], terms))
    touching: list[list[int]] = [[] for _ in pairs]
    for c, (_, _, terms) in enumerate(constraints):
        for v, _ in terms:
            touching[v].append(c)

    vals = [0] * len(pairs)
    trail: list[int] = []
    failures: list[int] = []

    def holds(target, terms, assign) -> bool:
        pf = spec.zero
        for v, coef in terms:
            pf = add(pf, coef) if assign(v) > 0 else sub_(pf, coef)
        return mul(pf, pf) == target

    def propagate(queue: list[int]) -> bool:
        while queue:
            v = queue.pop()
            for c in touching[v]:
                mask, target, terms = constraints[c]
                free = [w for w, _ in terms if vals[w] == 0]
                if not free:
                    if not holds(target, terms, lambda w: vals[w]):
                        failures.append(mask)
                        return False
                elif len(free) == 1:
                    w = free[0]
                    ok = [s for s in (1, -1) if holds(target, terms, lambda x, s=s: s if x == w else vals[x])]
                    if not ok:
                        failures.append(mask)
                        return False
                    if len(ok) == 1:
                        vals[w] = ok[0]
                        trail.append(w)
                        queue.append(w)
        return True

    def undo(mark: int):
        while len(trail) > mark:
            vals[trail.pop()] = 0

    solutions: list[SkewMatrix] = []
    rejected: list[int] = []

    def build() -> SkewMatrix:
        grid = [[spec.zero] * n for _ in range(n)]
        for z in range(1, n):
            grid[0][z] = roots[0][z]
            grid[z][0] = spec.neg(roots[0][z])
        for v, (j, k) in enumerate(pairs):
            x = roots[j][k] if vals[v] > 0 else spec.neg(roots[j][k])
            grid[j][k] = x
            grid[k][j] = spec.neg(x)
        return SkewMatrix(spec, T.labels, tuple(map(tuple, grid)))

    def validate(R: SkewMatrix) -> bool:
        kernel = PrincipalMinorKernel(R)
        for m, v in T.entries.items():
            if bin(m).count("1") >= 4 and kernel(m) != v:
                rejected.append(m)
                return False
        return True

    def search(start: int) -> bool:
        """Returns False once ``limit`` solutions are collected."""
        v = start
        while v < len(pairs) and vals[v] != 0:
            v += 1
        if v == len(pairs):
            R = build()
            if validate(R):
                solutions.append(R)
                if limit is not None and len(solutions) >= limit:
                    return False
            return True
        for s in (1, -1):
            mark = len(trail)
            vals[v] = s
            trail.append(v)
            if propagate([v]) and not search(v + 1):
                return False
            undo(mark)
        return True

    search(0)
    if not solutions:
        culprit = rejected[0] if rejected else (failures[-1] if failures else None)
        where = T.subset(culprit) if culprit is not None else None
        raise InconsistencyError(f"no skew matrix matches the table (violated at {where})", subset=where)
    return solutions

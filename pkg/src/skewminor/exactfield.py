"""Exact arithmetic over the rationals and over prime fields GF(p), p odd.

Matrices in this package store *raw* values for speed: a
:class:`fractions.Fraction` for the rationals and a reduced ``int`` residue
for GF(p).  :class:`FieldSpec` knows how to combine raw values, while
:class:`FieldElement` wraps one raw value together with its field for
callers that want operator syntax and mixed-field checking.

Both raw representations are canonical (lowest terms, positive
denominator; residues in ``[0, p)``) so ``==`` is field equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainError, FieldDomainError, SpecMismatchError

Raw = Union[Fraction, int]

RATIONAL = "rational"
PRIME = "prime"

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# Below this modulus square roots are found by scanning every residue.
SQRT_SCAN_LIMIT = 1 << 16


def is_prime(n: int) -> bool:
    """Miller-Rabin with the first 13 prime bases.

    Deterministic for n < 3.3e24, which covers every modulus we care about.
    """
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def tonelli_shanks(a: int, p: int) -> int | None:
    """Return some r with r*r = a (mod p), or None when a is a non-residue."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@dataclass(frozen=True)
class FieldSpec:
    """Which field we compute in: the rationals, or GF(p) for an odd prime p."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == RATIONAL:
            if self.p is not None:
                raise DomainError("the rational field takes no modulus")
        elif self.kind == PRIME:
            if not isinstance(self.p, int) or isinstance(self.p, bool):
                raise DomainError(f"prime field needs an integer modulus, got {self.p!r}")
            if self.p == 2:
                raise DomainError("characteristic 2 is not supported")
            if not is_prime(self.p):
                raise DomainError(f"modulus {self.p} is not prime")
        else:
            raise DomainError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> FieldSpec:
        return cls(RATIONAL)

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls(PRIME, p)

    @property
    def is_prime_field(self) -> bool:
        return self.kind == PRIME

    def __str__(self):
        return "QQ" if self.kind == RATIONAL else f"GF({self.p})"

    # -- raw-value arithmetic ------------------------------------------------

    @property
    def zero(self) -> Raw:
        return 0 if self.kind == PRIME else Fraction(0)

    @property
    def one(self) -> Raw:
        return 1 if self.kind == PRIME else Fraction(1)

    def coerce(self, x) -> Raw:
        """Turn an int, Fraction, text or FieldElement into a raw value."""
        if isinstance(x, FieldElement):
            if x.spec != self:
                raise SpecMismatchError(f"element of {x.spec} used in {self}")
            return x.value
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, bool):
            x = int(x)
        if self.kind == PRIME:
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise FieldDomainError(f"{x} has no image in {self}")
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            if isinstance(x, int):
                return x % self.p
        elif isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise DomainError(f"cannot interpret {x!r} as an element of {self}")

    def add(self, x: Raw, y: Raw) -> Raw:
        return (x + y) % self.p if self.kind == PRIME else x + y

    def sub(self, x: Raw, y: Raw) -> Raw:
        return (x - y) % self.p if self.kind == PRIME else x - y

    def mul(self, x: Raw, y: Raw) -> Raw:
        return x * y % self.p if self.kind == PRIME else x * y

    def neg(self, x: Raw) -> Raw:
        return -x % self.p if self.kind == PRIME else -x

    def inv(self, x: Raw) -> Raw:
        if x == 0:
            raise FieldDomainError(f"division by zero in {self}")
        return pow(x, -1, self.p) if self.kind == PRIME else 1 / x

    def div(self, x: Raw, y: Raw) -> Raw:
        return self.mul(x, self.inv(y))

    def sqrt(self, x: Raw) -> tuple[Raw, ...]:
        """All square roots of ``x``, ascending (by residue over GF(p))."""
        if self.kind == RATIONAL:
            if x < 0:
                return ()
            n, d = x.numerator, x.denominator
            rn, rd = math.isqrt(n), math.isqrt(d)
            if rn * rn != n or rd * rd != d:
                return ()
            r = Fraction(rn, rd)
            return (r,) if r == 0 else (-r, r)
        p = self.p
        if x == 0:
            return (0,)
        if p < SQRT_SCAN_LIMIT:
            roots = tuple(r for r in range(1, p) if r * r % p == x)
            return roots
        r = tonelli_shanks(x, p)
        if r is None:
            return ()
        return tuple(sorted((r, p - r)))

    def canonical_sqrt(self, x: Raw) -> Raw | None:
        """The preferred root: positive over QQ, smaller residue over GF(p)."""
        roots = self.sqrt(x)
        if not roots:
            return None
        return roots[-1] if self.kind == RATIONAL else roots[0]

    def is_square(self, x: Raw) -> bool:
        return bool(self.sqrt(x))

    # -- text encoding -------------------------------------------------------

    def parse(self, text: str) -> Raw:
        """Decode ``"n"`` or ``"num/den"`` (rationals) or a residue (GF(p))."""
        s = text.strip()
        try:
            if self.kind == RATIONAL:
                if "/" in s:
                    num, den = s.split("/")
                    n, d = int(num), int(den)
                    if d == 0:
                        raise FieldDomainError(f"zero denominator in {text!r}")
                    return Fraction(n, d)
                return Fraction(int(s))
            return int(s) % self.p
        except ValueError as exc:
            raise DomainError(f"cannot parse {text!r} as an element of {self}") from exc

    def format(self, x: Raw) -> str:
        if self.kind == PRIME:
            return str(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def element(self, x) -> FieldElement:
        return FieldElement(self, self.coerce(x))

    def to_json(self) -> dict:
        return {"kind": RATIONAL} if self.kind == RATIONAL else {"kind": PRIME, "p": self.p}

    @classmethod
    def from_json(cls, obj) -> FieldSpec:
        if not isinstance(obj, dict) or "kind" not in obj:
            raise DomainError(f"malformed field description {obj!r}")
        if obj["kind"] == RATIONAL:
            return cls.rationals()
        if obj["kind"] == PRIME:
            return cls.prime(obj.get("p"))
        raise DomainError(f"unknown field kind {obj['kind']!r}")

    @classmethod
    def from_text(cls, text: str) -> FieldSpec:
        """Parse ``"rational"``, ``"QQ"``, ``"7"``, ``"GF(7)"`` or ``"prime:7"``."""
        t = text.strip()
        if t.lower() in ("rational", "rationals", "qq", "q"):
            return cls.rationals()
        for prefix in ("GF(", "gf(", "prime:", "p="):
            if t.startswith(prefix):
                t = t[len(prefix):].rstrip(")")
                break
        try:
            return cls.prime(int(t))
        except ValueError as exc:
            raise DomainError(f"unrecognised field {text!r}") from exc


QQ = FieldSpec.rationals()


def GF(p: int) -> FieldSpec:
    return FieldSpec.prime(p)


@dataclass(frozen=True)
class FieldElement:
    """An immutable element of a :class:`FieldSpec`.

    Plain ints and Fractions on the other side of an operator are coerced
    into the field; elements of a different field raise SpecMismatchError.
    """

    spec: FieldSpec
    value: Raw

    def __post_init__(self):
        object.__setattr__(self, "value", self.spec.coerce(self.value))

    def _other(self, y) -> Raw:
        if isinstance(y, FieldElement):
            if y.spec != self.spec:
                raise SpecMismatchError(f"cannot combine {self.spec} with {y.spec}")
            return y.value
        if isinstance(y, (int, Fraction)):
            return self.spec.coerce(y)
        return NotImplemented

    def _wrap(self, v: Raw) -> FieldElement:
        return FieldElement(self.spec, v)

    def __add__(self, y):
        v = self._other(y)
        return NotImplemented if v is NotImplemented else self._wrap(self.spec.add(self.value, v))

    __radd__ = __add__

    def __sub__(self, y):
        v = self._other(y)
        return NotImplemented if v is NotImplemented else self._wrap(self.spec.sub(self.value, v))

    def __rsub__(self, y):
        v = self._other(y)
        return NotImplemented if v is NotImplemented else self._wrap(self.spec.sub(v, self.value))

    def __mul__(self, y):
        v = self._other(y)
        return NotImplemented if v is NotImplemented else self._wrap(self.spec.mul(self.value, v))

    __rmul__ = __mul__

    def __truediv__(self, y):
        v = self._other(y)
        return NotImplemented if v is NotImplemented else self._wrap(self.spec.div(self.value, v))

    def __rtruediv__(self, y):
        v = self._other(y)
        return NotImplemented if v is NotImplemented else self._wrap(self.spec.div(v, self.value))

    def __neg__(self):
        return self._wrap(self.spec.neg(self.value))

    def __pow__(self, e: int):
        if e < 0:
            return self._wrap(self.spec.inv(self.value)) ** (-e)
        out = self.spec.one
        for _ in range(e):
            out = self.spec.mul(out, self.value)
        return self._wrap(out)

    def __eq__(self, y):
        if isinstance(y, FieldElement):
            if y.spec != self.spec:
                raise SpecMismatchError(f"cannot compare {self.spec} with {y.spec}")
            return self.value == y.value
        if isinstance(y, (int, Fraction)):
            try:
                return self.value == self.spec.coerce(y)
            except FieldDomainError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.value))

    def __bool__(self):
        return self.value != 0

    def inverse(self) -> FieldElement:
        return self._wrap(self.spec.inv(self.value))

    def sqrt(self) -> tuple[FieldElement, ...]:
        return fe_sqrt(self)

    def __str__(self):
        return self.spec.format(self.value)

    def __repr__(self):
        return f"FieldElement({self.spec}, {self})"


def fe_arith(x: FieldElement, y: FieldElement, op: str) -> FieldElement:
    """Apply ``op`` in {"add", "sub", "mul", "div"} to two elements of one field."""
    if x.spec != y.spec:
        raise SpecMismatchError(f"cannot combine {x.spec} with {y.spec}")
    try:
        fn = {"add": x.spec.add, "sub": x.spec.sub, "mul": x.spec.mul, "div": x.spec.div}[op]
    except KeyError:
        raise DomainError(f"unknown operation {op!r}") from None
    return FieldElement(x.spec, fn(x.value, y.value))


def fe_sqrt(x: FieldElement) -> tuple[FieldElement, ...]:
    """Every square root of ``x`` (0, 1 or 2 of them), in ascending order."""
    return tuple(FieldElement(x.spec, r) for r in x.spec.sqrt(x.value))

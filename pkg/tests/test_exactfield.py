from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_sqrt
from skewminor.errors import DomainError, FieldDomainError, SpecMismatchError
from skewminor.exactfield import GF, QQ, FieldElement, FieldSpec, fe_arith, fe_sqrt, is_prime, tonelli_shanks

PRIMES = [3, 5, 7, 11, 13, 101, 65537, 1_000_003]

rationals = st.fractions(max_denominator=10**6)
nonzero_rationals = rationals.filter(lambda x: x != 0)


def test_rational_addition():
    x, y = QQ.element(Fraction(1, 2)), QQ.element(Fraction(1, 3))
    assert fe_arith(x, y, "add") == QQ.element(Fraction(5, 6))


def test_prime_multiplication():
    assert fe_arith(GF(7).element(3), GF(7).element(5), "mul") == GF(7).element(1)


@pytest.mark.parametrize("spec", [QQ, GF(7), GF(13)])
def test_self_division_is_one(spec):
    x = spec.element(4)
    assert fe_arith(x, x, "div") == spec.element(1)


def test_canonical_rational_form():
    x = FieldElement(QQ, Fraction(6, -4))
    assert x.value.numerator == -3 and x.value.denominator == 2
    assert str(x) == "-3/2"
    assert FieldElement(QQ, Fraction(2, 4)) == FieldElement(QQ, Fraction(1, 2))


def test_prime_values_reduced():
    assert GF(7).element(-1).value == 6
    assert GF(7).element(15).value == 1


def test_mixed_specs_rejected():
    with pytest.raises(SpecMismatchError):
        fe_arith(QQ.element(1), GF(7).element(1), "add")
    with pytest.raises(SpecMismatchError):
        GF(5).element(1) + GF(7).element(1)


def test_division_by_zero():
    with pytest.raises(FieldDomainError):
        fe_arith(QQ.element(1), QQ.element(0), "div")
    with pytest.raises(FieldDomainError):
        GF(7).element(3) / 0


@pytest.mark.parametrize("p", [2, 4, 9, 1, 0, -3])
def test_bad_moduli_rejected(p):
    with pytest.raises(DomainError):
        FieldSpec.prime(p)


def test_sqrt_examples():
    assert set(fe_sqrt(QQ.element(Fraction(9, 4)))) == {QQ.element(Fraction(3, 2)), QQ.element(Fraction(-3, 2))}
    assert [r.value for r in fe_sqrt(GF(7).element(2))] == [3, 4]
    assert fe_sqrt(GF(5).element(3)) == ()
    assert fe_sqrt(QQ.element(2)) == ()
    assert fe_sqrt(QQ.element(-4)) == ()
    assert fe_sqrt(QQ.element(Fraction(4, 3))) == ()
    assert [r.value for r in fe_sqrt(GF(11).element(0))] == [0]


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 97])
def test_sqrt_matches_exhaustive_scan(p):
    F = GF(p)
    for x in range(p):
        assert list(F.sqrt(x)) == brute_sqrt(x, p)


@pytest.mark.parametrize("p", [65537, 1_000_003, 2**61 - 1, 998244353])
def test_tonelli_shanks_large(p):
    F = GF(p)
    for x in (2, 3, 5, 12345, p - 1, 10**9 % p):
        roots = F.sqrt(x)
        assert len(roots) in (0, 2)
        for r in roots:
            assert r * r % p == x % p
        assert bool(roots) == (pow(x, (p - 1) // 2, p) == 1)
        if roots:
            assert roots[0] < roots[1] and roots[0] + roots[1] == p


def test_tonelli_shanks_p_1_mod_8():
    # 17 = 1 + 2^4, exercises the full loop
    for x in range(17):
        r = tonelli_shanks(x, 17)
        assert (r is None) == (not brute_sqrt(x, 17))


def test_canonical_roots():
    assert QQ.canonical_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert GF(7).canonical_sqrt(2) == 3
    assert GF(5).canonical_sqrt(3) is None


@pytest.mark.parametrize("p", PRIMES)
def test_is_prime_accepts(p):
    assert is_prime(p)


@pytest.mark.parametrize("n", [1, 4, 561, 1105, 65535, 3215031751, 2**61 + 1])
def test_is_prime_rejects(n):
    assert not is_prime(n)


def test_text_round_trip():
    for spec, texts in [(QQ, ["0", "-7", "3/4", "-1/9"]), (GF(7), ["0", "3", "6"])]:
        for t in texts:
            assert spec.format(spec.parse(t)) == t
    assert QQ.format(QQ.parse("6/8")) == "3/4"
    assert GF(7).parse("-1") == 6
    with pytest.raises(DomainError):
        QQ.parse("abc")


def test_field_text_spellings():
    assert FieldSpec.from_text("rational") == QQ
    assert FieldSpec.from_text("GF(7)") == GF(7)
    assert FieldSpec.from_text("11") == GF(11)
    assert FieldSpec.from_json({"kind": "prime", "p": 5}) == GF(5)
    with pytest.raises(DomainError):
        FieldSpec.from_text("2")


@given(nonzero_rationals)
def test_rational_inverse(x):
    e = QQ.element(x)
    assert e * e.inverse() == QQ.element(1)


@given(st.sampled_from([3, 5, 7, 13, 65537]), st.integers())
def test_prime_inverse(p, v):
    e = GF(p).element(v)
    if e:
        assert e * e.inverse() == 1


@given(rationals, rationals, rationals)
def test_rational_field_axioms(a, b, c):
    x, y, z = QQ.element(a), QQ.element(b), QQ.element(c)
    assert (x + y) + z == x + (y + z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z


@given(st.sampled_from([3, 7, 101]), st.integers(), st.integers(), st.integers())
def test_prime_field_axioms(p, a, b, c):
    F = GF(p)
    x, y, z = F.element(a), F.element(b), F.element(c)
    assert (x * y) * z == x * (y * z)
    assert x + y == y + x
    assert x * (y - z) == x * y - x * z


@given(st.sampled_from([QQ, GF(7), GF(13), GF(65537)]), st.integers(-10**6, 10**6))
def test_sqrt_roots_square_back(spec, v):
    x = spec.element(v)
    for xx in (x, x * x):
        roots = fe_sqrt(xx)
        assert len(roots) in (0, 1, 2)
        for r in roots:
            assert r * r == xx
        if len(roots) == 2:
            assert roots[0] == -roots[1]
    assert fe_sqrt(x * x)

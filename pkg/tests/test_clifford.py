from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwspin.clifford import (
    NotInSpinError,
    PinElement,
    SpinCElement,
    lam,
    lift_diagonal,
    pin_multiply,
    signs_product,
    spinc_i,
    spinc_j,
    spinc_l,
    spinc_lambda_bar,
    spinc_multiply,
    spinc_p,
)

F = Fraction
N = 6


def reduce_word(word):
    """Normal form of a product of basis vectors by bubble sort.

    Swapping adjacent distinct e_i costs a sign, e_i e_i = -1.  Returns
    (sign, sorted index tuple).  Independent of the closed sign formula.
    """
    w = list(word)
    sign = 1
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(w) - 1:
            if w[i] == w[i + 1]:
                del w[i : i + 2]
                sign = -sign
                changed = True
            elif w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                sign = -sign
                changed = True
                i += 1
            else:
                i += 1
    return sign, tuple(w)


def as_word(g):
    return g.indices


def word_product(a, b):
    s, idx = reduce_word(as_word(a) + as_word(b))
    return PinElement(a.n, a.sign * b.sign * s, sum(1 << (k - 1) for k in idx))


pins = st.builds(lambda s, m: PinElement(N, s, m), st.sampled_from([1, -1]), st.integers(0, (1 << N) - 1))
spins = pins.filter(lambda g: g.in_spin)
angles = st.fractions(min_value=0, max_value=1, max_denominator=12).map(lambda q: q % 1)


def test_square_of_basis_vector():
    e1 = PinElement.basis(3, 1)
    assert e1 * e1 == -PinElement.one(3)


def test_square_of_bivector():
    e12 = PinElement.basis(3, 1, 2)
    assert e12 * e12 == -PinElement.one(3)


def test_identity_right():
    g = PinElement(5, -1, 0b10110)
    assert g * PinElement.one(5) == g


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        pin_multiply(PinElement.one(3), PinElement.one(4))


@given(pins, pins)
def test_multiply_matches_word_reduction(a, b):
    assert pin_multiply(a, b) == word_product(a, b)


@given(pins, pins, pins)
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(pins)
def test_inverse(a):
    assert a * a.inverse() == PinElement.one(N)
    assert a.inverse() * a == PinElement.one(N)


def test_anticommutation():
    for i in range(1, N + 1):
        ei = PinElement.basis(N, i)
        assert ei * ei == -PinElement.one(N)
        for j in range(1, N + 1):
            if i != j:
                ej = PinElement.basis(N, j)
                assert ei * ej == -(ej * ei)


def test_group_order():
    # closure of {e_1, e_2, e_3} has 2^(3+1) elements
    n = 3
    seen = {PinElement.one(n)}
    frontier = list(seen)
    gens = [PinElement.basis(n, i) for i in (1, 2, 3)]
    while frontier:
        g = frontier.pop()
        for h in gens:
            x = g * h
            if x not in seen:
                seen.add(x)
                frontier.append(x)
    assert len(seen) == 16


def test_lift_diagonal_b1():
    g = lift_diagonal((1, -1, -1, -1, -1))
    assert g.indices == (2, 3, 4, 5) and g.sign == 1 and g.in_spin


def test_lift_identity_and_reflection():
    assert lift_diagonal((1, 1, 1)) == PinElement.one(3)
    r = lift_diagonal((-1, 1, 1))
    assert r.indices == (1,) and not r.in_spin


def conjugation_lambda(g):
    """Diagonal of v -> g v g^-1 read off on each basis vector, via word reduction."""
    out = []
    for j in range(1, g.n + 1):
        ej = PinElement.basis(g.n, j)
        x = word_product(word_product(g, ej), g.inverse())
        assert x.subset == ej.subset
        out.append(x.sign)
    return tuple(out)


def test_lambda_examples():
    assert lam(PinElement(5, 1, 0b11110)) == (1, -1, -1, -1, -1)
    assert lam(-PinElement.one(4)) == (1, 1, 1, 1)
    assert lam(PinElement.basis(3, 1, 2)) == (-1, -1, 1)
    assert conjugation_lambda(PinElement(5, 1, 0b11110)) == (1, -1, -1, -1, -1)
    assert conjugation_lambda(PinElement.basis(3, 1, 2)) == (-1, -1, 1)


def test_lambda_rejects_odd():
    with pytest.raises(NotInSpinError):
        lam(PinElement.basis(3, 2))


@given(spins)
def test_lambda_matches_conjugation(g):
    assert lam(g) == conjugation_lambda(g)
    assert lam(g) == lam(-g)


@given(spins, spins)
def test_lambda_homomorphism(a, b):
    assert lam(a * b) == signs_product(lam(a), lam(b))


@given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=N).filter(lambda s: s.count(-1) % 2 == 0))
def test_lambda_of_lift(signs):
    assert lam(lift_diagonal(signs)) == tuple(signs)


# -- Spin^C ------------------------------------------------------------------


def test_spinc_quarter_turns():
    q = SpinCElement.make(PinElement.one(3), F(1, 4))
    assert q * q == SpinCElement.make(PinElement.one(3), F(1, 2))
    assert q * q == SpinCElement(-PinElement.one(3), F(0))
    assert spinc_l(q) == F(1, 2)


def test_spinc_canonical_sign():
    g = PinElement(4, 1, 0b0110)
    x = SpinCElement(-g, F(1, 3))
    assert x.pin == g and x.angle == F(5, 6)


def test_spinc_lambda_bar_ignores_angle():
    g = PinElement(5, 1, 0b11110)
    for q in (F(0), F(1, 7), F(1, 2), F(5, 6)):
        assert spinc_lambda_bar(SpinCElement.make(g, q)) == (1, -1, -1, -1, -1)


def test_spinc_rejects_odd():
    with pytest.raises(NotInSpinError):
        SpinCElement.make(PinElement.basis(3, 1))


def test_structure_maps():
    g = PinElement.basis(4, 1, 3)
    assert spinc_i(g) == SpinCElement.make(g)
    assert spinc_j(F(1, 3), 4).pin == PinElement.one(4)
    # i(-1) = j(-1): the two copies of {+-1} are identified
    assert spinc_i(-PinElement.one(4)) == spinc_j(F(1, 2), 4)
    assert spinc_p(SpinCElement.make(g, F(1, 3))) == ((-1, 1, -1, 1), F(2, 3))


spincs = st.builds(SpinCElement.make, spins, angles)


@given(spincs, spincs)
def test_spinc_lambda_bar_homomorphism(a, b):
    assert spinc_lambda_bar(a * b) == signs_product(spinc_lambda_bar(a), spinc_lambda_bar(b))
    assert spinc_l(a * b) == (spinc_l(a) + spinc_l(b)) % 1


@given(spincs, spincs, spincs)
def test_spinc_associative(a, b, c):
    assert spinc_multiply(spinc_multiply(a, b), c) == spinc_multiply(a, spinc_multiply(b, c))


@given(spincs)
def test_spinc_canonicalisation_idempotent(a):
    again = SpinCElement(a.pin, a.angle)
    assert again == a and a.pin.sign == 1 and 0 <= a.angle < 1
    assert a * a.inverse() == SpinCElement.one(N)

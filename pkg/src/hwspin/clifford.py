"""The finite Clifford group generated by e_1, ..., e_n, and its Spin^C extension.

Elements are ``+-e_S`` where ``e_S`` is the ordered product of the basis
vectors indexed by ``S`` (increasing index order).  The convention is
``e_i^2 = -1`` and ``e_i e_j = -e_j e_i`` for ``i != j``.  Subsets are stored
as bit masks, bit ``k - 1`` standing for index ``k``.

Spin^C elements are classes ``[g, z]`` of pairs with ``g`` in Spin(n) and
``z`` on the circle, modulo ``[g, z] = [-g, -z]``.  The circle factor is an
additive angle in [0, 1), and the stored Clifford part always has sign +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_linalg import HALF, frac_mod1


class NotInSpinError(ValueError):
    """The element has odd degree, so it lies in Pin(n) but not Spin(n)."""


def _popcount(x: int) -> int:
    return bin(x).count("1")


def reorder_sign(S: int, T: int) -> int:
    """Sign of ``e_S e_T`` relative to ``e_{S xor T}``.

    Equals ``(-1)^(m + |S & T|)`` where ``m`` counts pairs ``(s, t)`` in
    ``S x T`` with ``s > t``.
    """
    m = 0
    t = T
    while t:
        low = t & -t
        m += _popcount(S & ~((low << 1) - 1))
        t ^= low
    return -1 if (m + _popcount(S & T)) & 1 else 1


@dataclass(frozen=True)
class PinElement:
    n: int
    sign: int
    subset: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.subset >> self.n:
            raise ValueError(f"subset {self.subset:b} exceeds dimension {self.n}")

    @classmethod
    def one(cls, n: int) -> "PinElement":
        return cls(n, 1, 0)

    @classmethod
    def basis(cls, n: int, *indices: int) -> "PinElement":
        """``e_{i1} e_{i2} ...`` for 1-based indices, in the order given."""
        out = cls.one(n)
        for i in indices:
            out = out * cls(n, 1, 1 << (i - 1))
        return out

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(k + 1 for k in range(self.n) if (self.subset >> k) & 1)

    @property
    def degree(self) -> int:
        return _popcount(self.subset)

    @property
    def in_spin(self) -> bool:
        return self.degree % 2 == 0

    def __mul__(self, other: "PinElement") -> "PinElement":
        return pin_multiply(self, other)

    def __neg__(self) -> "PinElement":
        return PinElement(self.n, -self.sign, self.subset)

    def inverse(self) -> "PinElement":
        # e_S e_S = reorder_sign(S, S) * 1
        return PinElement(self.n, self.sign * reorder_sign(self.subset, self.subset), self.subset)

    def __str__(self) -> str:
        body = "e_{" + ",".join(map(str, self.indices)) + "}" if self.subset else "1"
        return ("-" if self.sign < 0 else "") + body


def pin_multiply(a: PinElement, b: PinElement) -> PinElement:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    return PinElement(a.n, a.sign * b.sign * reorder_sign(a.subset, b.subset), a.subset ^ b.subset)


def lift_diagonal(signs: Sequence[int]) -> PinElement:
    """Canonical lift ``e_S`` of ``diag(signs)``, ``S`` the negated coordinates.

    Whether the lift lies in Spin(n) is available as ``.in_spin``.
    """
    mask = 0
    for k, s in enumerate(signs):
        if s == -1:
            mask |= 1 << k
        elif s != 1:
            raise ValueError(f"diagonal entry {s} at position {k} is not +-1")
    return PinElement(len(signs), 1, mask)


def lam(g: PinElement) -> tuple[int, ...]:
    """The covering map Spin(n) -> SO(n) on ``+-e_S``.

    Conjugation ``e_S e_j e_S^{-1}`` is ``-e_j`` exactly when ``j`` is in
    ``S`` (for ``|S|`` even), so the image is the diagonal matrix with -1 on
    ``S``.
    """
    if not g.in_spin:
        raise NotInSpinError(f"{g} has odd degree")
    return tuple(-1 if (g.subset >> k) & 1 else 1 for k in range(g.n))


def signs_product(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class SpinCElement:
    """``[g, exp(2 pi i angle)]`` stored with ``g.sign == +1``."""

    pin: PinElement
    angle: Fraction

    def __post_init__(self):
        if not self.pin.in_spin:
            raise NotInSpinError(f"{self.pin} has odd degree")
        if self.pin.sign < 0:
            object.__setattr__(self, "pin", -self.pin)
            object.__setattr__(self, "angle", self.angle + HALF)
        object.__setattr__(self, "angle", frac_mod1(self.angle))

    @classmethod
    def make(cls, pin: PinElement, angle=0) -> "SpinCElement":
        return cls(pin, Fraction(angle))

    @classmethod
    def one(cls, n: int) -> "SpinCElement":
        return cls(PinElement.one(n), Fraction(0))

    def __mul__(self, other: "SpinCElement") -> "SpinCElement":
        return spinc_multiply(self, other)

    def inverse(self) -> "SpinCElement":
        return SpinCElement(self.pin.inverse(), -self.angle)

    def __str__(self) -> str:
        return f"[{self.pin}, {self.angle}]"


def spinc_multiply(a: SpinCElement, b: SpinCElement) -> SpinCElement:
    return SpinCElement(pin_multiply(a.pin, b.pin), a.angle + b.angle)


def spinc_lambda_bar(a: SpinCElement) -> tuple[int, ...]:
    return lam(a.pin)


def spinc_l(a: SpinCElement) -> Fraction:
    """``l[g, z] = z^2``, as an angle."""
    return frac_mod1(2 * a.angle)


def spinc_i(g: PinElement) -> SpinCElement:
    return SpinCElement(g, Fraction(0))


def spinc_j(angle, n: int) -> SpinCElement:
    return SpinCElement(PinElement.one(n), Fraction(angle))


def spinc_p(a: SpinCElement) -> tuple[tuple[int, ...], Fraction]:
    return spinc_lambda_bar(a), spinc_l(a)


def sign_angle(sign: int) -> Fraction:
    """+1 -> 0, -1 -> 1/2."""
    return HALF if sign < 0 else Fraction(0)

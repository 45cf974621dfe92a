"""Bieberbach groups with diagonal holonomy.

A group is given by a list of affine generators ``(D, c)`` with ``D`` a
diagonal +-1 matrix (stored as its sign vector) and ``c`` a rational
translation; the lattice is always ``Z^n``.  :func:`build_group` picks an
independent set of generators for the holonomy (an elementary abelian
2-group), and every element then has a unique normal form
``beta^a * t`` with ``a`` a bit vector over the independent generators and
``t`` a lattice vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Optional, Sequence

from .exact_linalg import frac_mod1, smith_normal_form


class GroupValidationError(ValueError):
    """The generator data does not define a valid group with lattice Z^n."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _as_fraction_vector(values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class AffineElement:
    """The isometry ``x -> diag(signs) x + translation``."""

    signs: tuple[int, ...]
    translation: tuple[Fraction, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        trans = _as_fraction_vector(self.translation)
        if len(signs) != len(trans):
            raise ValueError(f"{len(signs)} signs but {len(trans)} translation entries")
        for k, s in enumerate(signs):
            if s not in (1, -1):
                raise ValueError(f"rotation entry {s} at position {k} is not +-1 (only diagonal holonomy)")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "translation", trans)

    @classmethod
    def identity(cls, n: int) -> "AffineElement":
        return cls((1,) * n, (Fraction(0),) * n)

    @classmethod
    def translation_by(cls, vector) -> "AffineElement":
        return cls((1,) * len(vector), vector)

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def neg_mask(self) -> int:
        return sum(1 << k for k, s in enumerate(self.signs) if s < 0)

    @property
    def is_translation(self) -> bool:
        return all(s == 1 for s in self.signs)

    @property
    def determinant(self) -> int:
        return -1 if bin(self.neg_mask).count("1") % 2 else 1

    def __mul__(self, other: "AffineElement") -> "AffineElement":
        return compose(self, other)

    def inverse(self) -> "AffineElement":
        return inverse(self)

    def __pow__(self, k: int) -> "AffineElement":
        base = self if k >= 0 else self.inverse()
        out = AffineElement.identity(self.n)
        for _ in range(abs(k)):
            out = out * base
        return out

    def normalized(self) -> "AffineElement":
        """Same rotation, translation reduced mod Z^n."""
        return AffineElement(self.signs, tuple(frac_mod1(c) for c in self.translation))

    def __str__(self) -> str:
        sg = ",".join(str(s) for s in self.signs)
        tr = ",".join(str(c) for c in self.translation)
        return f"([{sg}], ({tr}))"


def compose(a: AffineElement, b: AffineElement) -> AffineElement:
    """``(A, a)(B, b) = (AB, a + A b)``."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    return AffineElement(
        tuple(x * y for x, y in zip(a.signs, b.signs)),
        tuple(p + s * q for p, s, q in zip(a.translation, a.signs, b.translation)),
    )


def inverse(a: AffineElement) -> AffineElement:
    """``(A, a)^{-1} = (A, -A a)`` for diagonal ``A``."""
    return AffineElement(a.signs, tuple(-s * c for s, c in zip(a.signs, a.translation)))


def commutator(a: AffineElement, b: AffineElement) -> AffineElement:
    return a * b * a.inverse() * b.inverse()


def _integral_vector(v: Sequence[Fraction]) -> Optional[tuple[int, ...]]:
    if all(c.denominator == 1 for c in v):
        return tuple(int(c) for c in v)
    return None


class BieberbachGroup:
    """A validated group with diagonal holonomy and lattice Z^n.

    Use :func:`build_group` to construct one.  ``basis`` lists the indices
    of the independent generators; ``dependents`` maps every other
    generator index to ``(a, t)`` with generator ``= t * representative(a)``.
    """

    def __init__(self, n, generators, basis, dependents, name=None):
        self.n = n
        self.generators: tuple[AffineElement, ...] = tuple(generators)
        self.basis: tuple[int, ...] = tuple(basis)
        self.dependents: dict[int, tuple[int, tuple[int, ...]]] = dict(dependents)
        self.name = name
        self.basis_elements = tuple(self.generators[i] for i in self.basis)
        self._reps: dict[int, AffineElement] = {}

    @property
    def dimension(self) -> int:
        return self.n

    @property
    def rank(self) -> int:
        """Rank m of the holonomy group (Z_2)^m."""
        return len(self.basis)

    @property
    def holonomy_order(self) -> int:
        return 1 << self.rank

    @property
    def basis_neg_masks(self) -> tuple[int, ...]:
        return tuple(g.neg_mask for g in self.basis_elements)

    def holonomy_mask(self, a: int) -> int:
        """Negated-coordinate mask of the holonomy element ``a``."""
        mask = 0
        for i, g in enumerate(self.basis_elements):
            if (a >> i) & 1:
                mask ^= g.neg_mask
        return mask

    def holonomy_elements(self) -> list[tuple[int, ...]]:
        return [self.representative(a).signs for a in range(self.holonomy_order)]

    def representative(self, a: int) -> AffineElement:
        """Ordered product of the independent generators selected by ``a``."""
        rep = self._reps.get(a)
        if rep is None:
            rep = AffineElement.identity(self.n)
            for i, g in enumerate(self.basis_elements):
                if (a >> i) & 1:
                    rep = rep * g
            self._reps[a] = rep
        return rep

    def normal_form(self, g: AffineElement) -> tuple[int, tuple[int, ...]]:
        """``(a, t)`` with ``g = t * representative(a)``.

        Raises :class:`GroupValidationError` if ``g`` is not in the group.
        """
        a = self._solve_holonomy(g.neg_mask)
        if a is None:
            raise GroupValidationError(f"{g}: rotation is not in the holonomy group")
        diff = g * self.representative(a).inverse()
        t = _integral_vector(diff.translation)
        if t is None:
            raise GroupValidationError(f"{g}: translation part differs from the group by a non-lattice vector")
        return a, t

    def contains(self, g: AffineElement) -> bool:
        try:
            self.normal_form(g)
        except GroupValidationError:
            return False
        return True

    def _solve_holonomy(self, mask: int) -> Optional[int]:
        for a in range(self.holonomy_order):
            if self.holonomy_mask(a) == mask:
                return a
        return None

    @property
    def orientable(self) -> bool:
        return all(g.determinant == 1 for g in self.generators)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<BieberbachGroup{label} n={self.n} rank={self.rank}>"


def build_group(n: int, generators: Iterable[AffineElement], name: Optional[str] = None) -> BieberbachGroup:
    """Validate generator data and build the group.

    Independent generators are chosen greedily, lowest index first.  Each
    dependent generator must agree with the ordered product of independent
    generators for its holonomy class up to a lattice vector, and all square
    and commutator translations must be integral.
    """
    gens = []
    for i, g in enumerate(generators):
        if not isinstance(g, AffineElement):
            g = AffineElement(*g)
        if g.n != n:
            raise GroupValidationError(f"generator {i + 1} has dimension {g.n}, expected {n}")
        gens.append(g)

    # greedy F_2 elimination on negation masks; reduced[p] = (mask, combo over basis positions)
    reduced: dict[int, tuple[int, int]] = {}
    basis: list[int] = []
    pending: dict[int, int] = {}
    for i, g in enumerate(gens):
        mask, combo = g.neg_mask, 0
        while mask:
            top = mask.bit_length() - 1
            if top not in reduced:
                break
            rmask, rcombo = reduced[top]
            mask ^= rmask
            combo ^= rcombo
        if mask:
            reduced[mask.bit_length() - 1] = (mask, combo ^ (1 << len(basis)))
            basis.append(i)
        else:
            pending[i] = combo

    group = BieberbachGroup(n, gens, basis, {}, name=name)
    for i, a in pending.items():
        diff = gens[i] * group.representative(a).inverse()
        t = _integral_vector(diff.translation)
        if t is None:
            raise GroupValidationError(
                f"generator {i + 1} is inconsistent with its normal form: "
                f"it differs from the representative by {diff}, which is not a lattice translation",
                witness=diff,
            )
        group.dependents[i] = (a, t)
    # lattice preservation
    presentation(group)
    return group


def lattice_vector(v: Sequence[int]) -> AffineElement:
    return AffineElement.translation_by(tuple(Fraction(x) for x in v))


# ---------------------------------------------------------------------------
# torsion and HW


@dataclass(frozen=True)
class TorsionCheck:
    torsion_free: bool
    witness: Optional[AffineElement] = None

    def __bool__(self) -> bool:
        return self.torsion_free


def is_torsion_free(G: BieberbachGroup) -> TorsionCheck:
    """Decide torsion-freeness class by class.

    The coset of ``(D, c)`` contains an element of finite order exactly when
    ``c`` is integral on the coordinates fixed by ``D``; then subtracting
    that integral part gives an involution, returned as the witness.
    """
    for a in range(1, G.holonomy_order):
        rep = G.representative(a)
        fixed = [k for k in range(G.n) if rep.signs[k] == 1]
        if all(rep.translation[k].denominator == 1 for k in fixed):
            shift = [rep.translation[k] if k in fixed else Fraction(0) for k in range(G.n)]
            witness = lattice_vector([-int(x) for x in shift]) * rep
            return TorsionCheck(False, witness)
    return TorsionCheck(True)


def is_hw(G: BieberbachGroup) -> bool:
    return (
        G.n % 2 == 1
        and G.orientable
        and G.rank == G.n - 1
        and bool(is_torsion_free(G))
    )


# ---------------------------------------------------------------------------
# presentation

Word = tuple[tuple[str, int, int], ...]  # (kind "b" | "t", 0-based index, exponent)


@dataclass(frozen=True)
class Relation:
    """``lhs == rhs`` in the group; ``name`` uses 1-based indices."""

    name: str
    lhs: Word
    rhs: Word


def _t_word(v: Sequence[int]) -> Word:
    return tuple(("t", k, int(x)) for k, x in enumerate(v) if x)


@dataclass(frozen=True)
class Presentation:
    """Polycyclic presentation over the independent generators.

    ``t_sq[i]`` is the translation of ``b_i^2``; ``t_comm[(i, j)]`` (i < j)
    that of ``b_i b_j b_i^{-1} b_j^{-1}``; ``action[i]`` is the sign by which
    ``b_i`` conjugates each lattice basis vector.  Indices are 0-based
    positions in the independent basis.
    """

    m: int
    n: int
    t_sq: tuple[tuple[int, ...], ...]
    t_comm: dict
    action: tuple[tuple[int, ...], ...]

    @property
    def negated_coordinates(self) -> list[int]:
        """Lattice coordinates negated by some holonomy element."""
        return [k for k in range(self.n) if any(act[k] == -1 for act in self.action)]

    def relations(self) -> list[Relation]:
        rels = []
        for i in range(self.m):
            rels.append(Relation(f"square({i + 1})", (("b", i, 1), ("b", i, 1)), _t_word(self.t_sq[i])))
        for i in range(self.m):
            for j in range(i + 1, self.m):
                rels.append(Relation(
                    f"comm({i + 1},{j + 1})",
                    (("b", i, 1), ("b", j, 1), ("b", i, -1), ("b", j, -1)),
                    _t_word(self.t_comm[(i, j)]),
                ))
        for i in range(self.m):
            for k in range(self.n):
                rels.append(Relation(
                    f"conj({i + 1},{k + 1})",
                    (("b", i, 1), ("t", k, 1), ("b", i, -1)),
                    (("t", k, self.action[i][k]),),
                ))
        for k in range(self.n):
            for l in range(k + 1, self.n):
                rels.append(Relation(
                    f"lattice({k + 1},{l + 1})",
                    (("t", k, 1), ("t", l, 1), ("t", k, -1), ("t", l, -1)),
                    (),
                ))
        return rels


def evaluate_word(word: Word, images_b: Sequence, images_t: Sequence, one, inv: Callable) -> object:
    out = one
    for kind, idx, e in word:
        x = images_b[idx] if kind == "b" else images_t[idx]
        if e < 0:
            x = inv(x)
        for _ in range(abs(e)):
            out = out * x
    return out


def presentation(G: BieberbachGroup) -> Presentation:
    """Square, commutator and conjugation data of ``G``.

    For diagonal ``B_i``: ``b_i^2`` translates by ``(I + B_i) c_i`` and
    ``[b_i, b_j]`` by ``(I - B_j) c_i - (I - B_i) c_j``.  Both must be
    integral or the lattice is not preserved.
    """
    els = G.basis_elements
    m = len(els)
    t_sq = []
    for i, g in enumerate(els):
        v = _integral_vector([(1 + s) * c for s, c in zip(g.signs, g.translation)])
        if v is None:
            raise GroupValidationError(f"square of generator {G.basis[i] + 1} is not a lattice translation")
        t_sq.append(v)
    t_comm = {}
    for i in range(m):
        for j in range(i + 1, m):
            gi, gj = els[i], els[j]
            v = _integral_vector([
                (1 - sj) * ci - (1 - si) * cj
                for si, sj, ci, cj in zip(gi.signs, gj.signs, gi.translation, gj.translation)
            ])
            if v is None:
                raise GroupValidationError(
                    f"commutator of generators {G.basis[i] + 1} and {G.basis[j] + 1} is not a lattice translation"
                )
            t_comm[(i, j)] = v
    return Presentation(m, G.n, tuple(t_sq), t_comm, tuple(g.signs for g in els))


def derived_relation_check(G: BieberbachGroup) -> bool:
    """Check ``(b_i b_{i+2})^2 = t_{i+1} t_{i+3}^{-1}`` for all i, indices mod n.

    Applies to the cyclic construction, whose generator list holds all n
    generators ``b_1, ..., b_n``.
    """
    n = G.n
    if len(G.generators) != n:
        raise ValueError(f"expected the {n} cyclic generators, got {len(G.generators)}")
    for i in range(n):
        lhs = (G.generators[i] * G.generators[(i + 2) % n]) ** 2
        v = [0] * n
        v[(i + 1) % n] += 1
        v[(i + 3) % n] -= 1
        if lhs != lattice_vector(v):
            return False
    return True


# ---------------------------------------------------------------------------
# invariants


def betti_profile(G: BieberbachGroup) -> list[int]:
    """Real Betti numbers ``b_0, ..., b_n``.

    ``H^p(M; R)`` is the holonomy-invariant part of the p-th exterior power;
    with diagonal holonomy ``e_T`` is invariant iff every independent
    generator negates an even number of coordinates in ``T``.
    """
    masks = G.basis_neg_masks
    counts = [0] * (G.n + 1)
    for T in range(1 << G.n):
        if all(bin(T & mk).count("1") % 2 == 0 for mk in masks):
            counts[bin(T).count("1")] += 1
    return counts


def betti(G: BieberbachGroup, p: int) -> int:
    if not 0 <= p <= G.n:
        raise ValueError(f"degree {p} out of range 0..{G.n}")
    masks = G.basis_neg_masks
    return sum(
        1
        for T in itertools.combinations(range(G.n), p)
        if all(sum((mk >> k) & 1 for k in T) % 2 == 0 for mk in masks)
    )


def h1_relation_matrix(G: BieberbachGroup) -> list[list[int]]:
    """Abelianised relations; columns are ``b_1..b_m`` then ``t_1..t_n``.

    Row order: squares, commutators, then ``2 t_k`` for each lattice
    coordinate negated by some generator.
    """
    P = presentation(G)
    m, n = P.m, P.n
    rows = []
    for i in range(m):
        row = [0] * (m + n)
        row[i] = 2
        for k, v in enumerate(P.t_sq[i]):
            row[m + k] -= v
        rows.append(row)
    for i in range(m):
        for j in range(i + 1, m):
            rows.append([0] * m + list(P.t_comm[(i, j)]))
    for k in P.negated_coordinates:
        row = [0] * (m + n)
        row[m + k] = 2
        rows.append(row)
    return rows


def h1_elementary_divisors(G: BieberbachGroup) -> list[int]:
    """Invariant factors of ``H_1(M; Z)``: torsion orders > 1, then a 0 per free summand."""
    rows = h1_relation_matrix(G)
    ncols = G.rank + G.n
    snf = smith_normal_form(rows, ncols)
    torsion = [d for d in snf.diagonal if d > 1]
    return torsion + [0] * (ncols - snf.rank)


@dataclass(frozen=True)
class HolonomyCharacter:
    """The k-th diagonal entry of the holonomy, as a map to {+1, -1}."""

    index: int
    basis_values: tuple[int, ...]

    def __call__(self, g: AffineElement) -> int:
        return g.signs[self.index]

    @property
    def trivial(self) -> bool:
        return all(v == 1 for v in self.basis_values)


class _Sign(int):
    def __mul__(self, other):
        return _Sign(int(self) * int(other))


def holonomy_characters(G: BieberbachGroup) -> list[HolonomyCharacter]:
    """The n characters whose line bundles sum to the tangent bundle.

    Each character is checked to respect every relation of the presentation.
    """
    P = presentation(G)
    rels = P.relations()
    out = []
    for k in range(G.n):
        values = tuple(g.signs[k] for g in G.basis_elements)
        b_images = [_Sign(v) for v in values]
        t_images = [_Sign(1)] * G.n
        for rel in rels:
            lhs = evaluate_word(rel.lhs, b_images, t_images, _Sign(1), lambda x: x)
            rhs = evaluate_word(rel.rhs, b_images, t_images, _Sign(1), lambda x: x)
            if lhs != rhs:
                raise AssertionError(f"character {k + 1} fails on {rel.name}")
        out.append(HolonomyCharacter(k, values))
    return out

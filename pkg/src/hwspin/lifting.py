"""Spin and Spin^C structures via lifts of the holonomy.

An oriented flat manifold is Spin iff its holonomy ``h`` lifts to a
homomorphism ``e: Gamma -> Spin(n)`` with ``lambda e = h``.  A lift
``eps: Gamma -> Spin^C(n)`` with ``lambda_bar eps = h`` always yields a
Spin^C structure, and when ``H^2(M; R) = 0`` every Spin^C structure arises
this way.

Both questions become linear systems.  Send each independent generator
``b_i`` to its canonical Clifford lift ``c_i = e_{S_i}`` (``S_i`` the
coordinates it negates), decorated by an unknown sign (Spin) or circle
element (Spin^C), and each lattice generator ``t_k`` to an unknown central
element.  The presentation relations then read:

* Spin, over F_2: ``chi . t_sq[i] = [c_i^2 = -1]`` and
  ``chi . t_comm[i][j] = [c_i c_j c_i^-1 c_j^-1 = -1]``.  Generator signs
  cancel because every relation uses each generator an even number of
  times; conjugation relations hold automatically for central values +-1.
* Spin^C, over R/Z: ``2 z_i - zeta . t_sq[i] = angle(c_i^2)``,
  ``-zeta . t_comm[i][j] = angle(commutator)`` and ``2 zeta_k = 0`` for
  every coordinate some generator negates (conjugation inverts
  ``zeta_k``).

A second, independent route (:func:`cocycle_oracle_decide`) writes one
equation per ordered pair of holonomy elements instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .clifford import (
    PinElement,
    SpinCElement,
    lam,
    lift_diagonal,
    reorder_sign,
    sign_angle,
    spinc_lambda_bar,
)
from .crystal import BieberbachGroup, Presentation, betti, evaluate_word, presentation
from .exact_linalg import (
    HALF,
    F2Result,
    f2_solve,
    f2_solve_bits,
    frac_mod1,
    torus_solve_sparse,
)

ORACLE_MAX_RANK = 12


class NonOrientableError(ValueError):
    """Spin and Spin^C questions are only asked for oriented manifolds."""


class HolonomyTooLargeError(RuntimeError):
    pass


class Kind(str, enum.Enum):
    SPIN = "spin"
    SPINC = "spinc"


class Answer(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    NO_LIFT_INCONCLUSIVE = "NO_LIFT_INCONCLUSIVE"


@dataclass
class StructureVerdict:
    """Decision plus its evidence.

    ``witness`` (on YES) maps ``"sigma"``/``"chi"`` to F_2 lists for Spin and
    ``"z"``/``"zeta"`` to angle lists for Spin^C, always relative to the
    canonical lifts ``e_{S_i}``.  ``obstruction`` (otherwise) is a list of
    ``(relation name, integer coefficient)`` pairs whose exponent rows
    cancel while the right-hand sides pair to ``pairing`` = 1/2.
    """

    kind: Kind
    answer: Answer
    method: str = "presentation"
    witness: Optional[dict] = None
    obstruction: Optional[list[tuple[str, int]]] = None
    pairing: Optional[Fraction] = None
    betti2: Optional[int] = None

    @property
    def exists(self) -> Optional[bool]:
        if self.answer is Answer.YES:
            return True
        if self.answer is Answer.NO:
            return False
        return None


def _require_orientable(G: BieberbachGroup) -> None:
    if not G.orientable:
        raise NonOrientableError(f"{G!r} is not orientable")


def canonical_lifts(G: BieberbachGroup, negate: frozenset = frozenset()) -> list[PinElement]:
    lifts = [lift_diagonal(g.signs) for g in G.basis_elements]
    return [-c if i in negate else c for i, c in enumerate(lifts)]


def _relation_signs(G: BieberbachGroup, negate: frozenset):
    lifts = canonical_lifts(G, negate)
    sq = [(c * c).sign for c in lifts]
    comm = {}
    for i in range(len(lifts)):
        for j in range(i + 1, len(lifts)):
            ci, cj = lifts[i], lifts[j]
            comm[(i, j)] = (ci * cj * ci.inverse() * cj.inverse()).sign
    return sq, comm


# ---------------------------------------------------------------------------
# Spin


@dataclass
class F2System:
    names: list[str]
    rows: list[list[int]]
    rhs: list[int]
    variables: list[str]


def build_spin_system(G: BieberbachGroup, negate: frozenset = frozenset()) -> F2System:
    """F_2 system in the lattice signs ``chi_1..chi_n``."""
    _require_orientable(G)
    P = presentation(G)
    sq, comm = _relation_signs(G, negate)
    names, rows, rhs = [], [], []
    for i in range(P.m):
        names.append(f"square({i + 1})")
        rows.append([v % 2 for v in P.t_sq[i]])
        rhs.append(int(sq[i] < 0))
    for i in range(P.m):
        for j in range(i + 1, P.m):
            names.append(f"comm({i + 1},{j + 1})")
            rows.append([v % 2 for v in P.t_comm[(i, j)]])
            rhs.append(int(comm[(i, j)] < 0))
    return F2System(names, rows, rhs, [f"chi{k + 1}" for k in range(G.n)])


def decide_spin(G: BieberbachGroup, negate: frozenset = frozenset()) -> StructureVerdict:
    system = build_spin_system(G, negate)
    res = f2_solve(system.rows, system.rhs, ncols=G.n)
    if res.consistent:
        # witness relative to canonical lifts: a negated lift flips its sigma
        sigma = [int(i in negate) for i in range(G.rank)]
        return StructureVerdict(Kind.SPIN, Answer.YES, witness={"sigma": sigma, "chi": res.solution})
    return StructureVerdict(
        Kind.SPIN,
        Answer.NO,
        obstruction=[(system.names[i], 1) for i in res.certificate],
        pairing=HALF,
    )


# ---------------------------------------------------------------------------
# Spin^C


@dataclass
class LiftingSystem:
    """Integer system over R/Z; columns are ``z_1..z_m`` then ``zeta_1..zeta_n``."""

    variables: list[str]
    two_torsion: list[bool]
    names: list[str]
    rows: list[dict[int, int]]
    rhs: list[Fraction]

    @property
    def ncols(self) -> int:
        return len(self.variables)

    def dense_rows(self) -> list[list[int]]:
        out = []
        for r in self.rows:
            v = [0] * self.ncols
            for k, c in r.items():
                v[k] = c
            out.append(v)
        return out


def build_spinc_system(G: BieberbachGroup, negate: frozenset = frozenset()) -> LiftingSystem:
    _require_orientable(G)
    P = presentation(G)
    m, n = P.m, P.n
    sq, comm = _relation_signs(G, negate)
    names, rows, rhs = [], [], []
    for i in range(m):
        row = {i: 2}
        for k, v in enumerate(P.t_sq[i]):
            if v:
                row[m + k] = -v
        names.append(f"square({i + 1})")
        rows.append(row)
        rhs.append(sign_angle(sq[i]))
    for i in range(m):
        for j in range(i + 1, m):
            row = {m + k: -v for k, v in enumerate(P.t_comm[(i, j)]) if v}
            names.append(f"comm({i + 1},{j + 1})")
            rows.append(row)
            rhs.append(sign_angle(comm[(i, j)]))
    negated = set(P.negated_coordinates)
    for k in sorted(negated):
        names.append(f"torsion({k + 1})")
        rows.append({m + k: 2})
        rhs.append(Fraction(0))
    variables = [f"z{i + 1}" for i in range(m)] + [f"zeta{k + 1}" for k in range(n)]
    two_torsion = [False] * m + [k in negated for k in range(n)]
    return LiftingSystem(variables, two_torsion, names, rows, rhs)


def _spinc_answer_when_blocked(G: BieberbachGroup) -> tuple[Answer, int]:
    b2 = betti(G, 2) if G.n >= 2 else 0
    return (Answer.NO if b2 == 0 else Answer.NO_LIFT_INCONCLUSIVE), b2


def decide_spinc(G: BieberbachGroup, negate: frozenset = frozenset()) -> StructureVerdict:
    """Tri-state Spin^C decision.

    A solution gives a structure outright.  Without one the answer is NO
    only when ``b_2 = 0``; otherwise the lifting criterion is not known to
    be necessary and the verdict is ``NO_LIFT_INCONCLUSIVE``.
    """
    system = build_spinc_system(G, negate)
    res = torus_solve_sparse(system.rows, system.rhs, system.ncols)
    m = G.rank
    if res.consistent:
        z = [frac_mod1(q + (HALF if i in negate else 0)) for i, q in enumerate(res.solution[:m])]
        return StructureVerdict(Kind.SPINC, Answer.YES, witness={"z": z, "zeta": res.solution[m:]})
    answer, b2 = _spinc_answer_when_blocked(G)
    return StructureVerdict(
        Kind.SPINC,
        answer,
        obstruction=[(system.names[i], c) for i, c in res.certificate.items()],
        pairing=res.pairing,
        betti2=b2,
    )


def decide(G: BieberbachGroup, kind: Kind | str) -> StructureVerdict:
    return decide_spin(G) if Kind(kind) is Kind.SPIN else decide_spinc(G)


# ---------------------------------------------------------------------------
# checking evidence


class MalformedWitnessError(ValueError):
    pass


def _check_relations(P: Presentation, b_images, t_images, one) -> bool:
    inv = lambda x: x.inverse()
    for rel in P.relations():
        lhs = evaluate_word(rel.lhs, b_images, t_images, one, inv)
        rhs = evaluate_word(rel.rhs, b_images, t_images, one, inv)
        if lhs != rhs:
            return False
    return True


def verify_witness(G: BieberbachGroup, verdict: StructureVerdict) -> bool:
    """Rebuild the lift from the witness and test every presentation relation.

    Also checks that the lift covers the holonomy (``lambda`` of each image
    equals the generator's rotation, lattice elements map to the kernel).
    """
    w = verdict.witness
    if w is None:
        raise MalformedWitnessError("verdict carries no witness")
    P = presentation(G)
    lifts = canonical_lifts(G)
    n, m = G.n, G.rank
    try:
        if verdict.kind is Kind.SPIN:
            sigma, chi = list(w["sigma"]), list(w["chi"])
            if len(sigma) != m or len(chi) != n:
                raise MalformedWitnessError("witness has wrong length")
            b_images = [-c if s % 2 else c for c, s in zip(lifts, sigma)]
            t_images = [PinElement(n, -1 if x % 2 else 1, 0) for x in chi]
            one = PinElement.one(n)
            covers = all(lam(b) == g.signs for b, g in zip(b_images, G.basis_elements))
            covers = covers and all(lam(t) == (1,) * n for t in t_images)
        else:
            z, zeta = [Fraction(q) for q in w["z"]], [Fraction(q) for q in w["zeta"]]
            if len(z) != m or len(zeta) != n:
                raise MalformedWitnessError("witness has wrong length")
            b_images = [SpinCElement(c, q) for c, q in zip(lifts, z)]
            t_images = [SpinCElement(PinElement.one(n), q) for q in zeta]
            one = SpinCElement.one(n)
            covers = all(spinc_lambda_bar(b) == g.signs for b, g in zip(b_images, G.basis_elements))
            covers = covers and all(spinc_lambda_bar(t) == (1,) * n for t in t_images)
    except (KeyError, TypeError) as exc:
        raise MalformedWitnessError(str(exc)) from exc
    return covers and _check_relations(P, b_images, t_images, one)


def verify_certificate(G: BieberbachGroup, verdict: StructureVerdict) -> bool:
    """Replay an obstruction: rows must cancel exactly, right sides pair to 1/2."""
    if verdict.obstruction is None:
        raise MalformedWitnessError("verdict carries no obstruction")
    if verdict.method == "cocycle":
        names, rows, rhs, ncols = _oracle_named_system(G, verdict.kind)
    elif verdict.kind is Kind.SPIN:
        s = build_spin_system(G)
        names, rows, rhs, ncols = s.names, s.rows, [HALF * b for b in s.rhs], G.n
        rows = [{k: v for k, v in enumerate(r) if v} for r in rows]
    else:
        s = build_spinc_system(G)
        names, rows, rhs, ncols = s.names, s.rows, s.rhs, s.ncols
    index = {nm: i for i, nm in enumerate(names)}
    total = [0] * ncols
    pairing = Fraction(0)
    for name, coef in verdict.obstruction:
        if name not in index:
            return False
        i = index[name]
        for k, v in rows[i].items():
            total[k] += coef * v
        pairing += coef * Fraction(rhs[i])
    if verdict.kind is Kind.SPIN:
        cancels = all(v % 2 == 0 for v in total)
    else:
        cancels = not any(total)
    return cancels and frac_mod1(pairing) == HALF


# ---------------------------------------------------------------------------
# pairwise cocycle oracle


def _pairwise_data(G: BieberbachGroup):
    """Representatives, lift signs and lattice cocycle for all pairs.

    Translations are scaled by a common denominator so composition is pure
    integer arithmetic.
    """
    m, n = G.rank, G.n
    if m > ORACLE_MAX_RANK:
        raise HolonomyTooLargeError(f"holonomy of order 2^{m} exceeds the oracle limit 2^{ORACLE_MAX_RANK}")
    L = lcm(1, *(c.denominator for g in G.basis_elements for c in g.translation))
    gens = [(g.neg_mask, [int(c * L) for c in g.translation]) for g in G.basis_elements]
    size = 1 << m
    neg = [0] * size
    tr = [[0] * n] * size
    tr[0] = [0] * n
    for a in range(1, size):
        top = a.bit_length() - 1
        pa, pt = neg[a ^ (1 << top)], tr[a ^ (1 << top)]
        gm, gt = gens[top]
        neg[a] = pa ^ gm
        tr[a] = [x - y if (pa >> k) & 1 else x + y for k, (x, y) in enumerate(zip(pt, gt))]
    return size, neg, tr, L


def _pair_cocycle(neg, tr, L, a, b, n):
    ab = a ^ b
    na, ta, tb, tab = neg[a], tr[a], tr[b], tr[ab]
    vec = []
    for k in range(n):
        v = ta[k] + (-tb[k] if (na >> k) & 1 else tb[k]) - tab[k]
        if v % L:
            raise AssertionError("pairwise cocycle is not a lattice vector")
        vec.append(v // L)
    return vec, reorder_sign(na, neg[b])


def _oracle_named_system(G: BieberbachGroup, kind: Kind):
    """The pairwise system in sparse form with relation names (for replay)."""
    n = G.n
    size, neg, tr, L = _pairwise_data(G)
    names, rows, rhs = [], [], []
    for a in range(size):
        for b in range(size):
            vec, s = _pair_cocycle(neg, tr, L, a, b, n)
            row: dict[int, int] = {}
            for col in (a, b):
                row[col] = row.get(col, 0) + 1
            row[a ^ b] = row.get(a ^ b, 0) - 1
            for k, v in enumerate(vec):
                if v:
                    row[size + k] = -v
            names.append(f"pair({a},{b})")
            rows.append({k: v for k, v in row.items() if v})
            rhs.append(sign_angle(s))
    all_neg = 0
    for x in neg:
        all_neg |= x
    if Kind(kind) is Kind.SPINC:
        for k in range(n):
            if (all_neg >> k) & 1:
                names.append(f"torsion({k + 1})")
                rows.append({size + k: 2})
                rhs.append(Fraction(0))
    return names, rows, rhs, size + n


def cocycle_oracle_decide(G: BieberbachGroup, kind: Kind | str) -> StructureVerdict:
    """Decide from the full pairwise cocycle of the holonomy.

    One unknown per holonomy element ``f`` (a sign or circle value attached
    to the canonical lift of ``f``'s rotation) plus the lattice unknowns,
    and one equation ``gamma_f gamma_g = t(f, g) gamma_fg`` per ordered
    pair.  Exponential in the holonomy rank; meant as a cross-check.
    """
    _require_orientable(G)
    kind = Kind(kind)
    n = G.n
    if kind is Kind.SPIN:
        size, neg, tr, L = _pairwise_data(G)
        names, bits, rhs = [], [], []
        for a in range(size):
            for b in range(size):
                vec, s = _pair_cocycle(neg, tr, L, a, b, n)
                row = (1 << a) ^ (1 << b) ^ (1 << (a ^ b))
                for k, v in enumerate(vec):
                    if v % 2:
                        row ^= 1 << (size + k)
                names.append(f"pair({a},{b})")
                bits.append(row)
                rhs.append(int(s < 0))
        res: F2Result = f2_solve_bits(bits, rhs, size + n)
        if res.consistent:
            return StructureVerdict(
                Kind.SPIN, Answer.YES, method="cocycle",
                witness={"sigma_all": res.solution[:size], "chi": res.solution[size:]},
            )
        return StructureVerdict(
            Kind.SPIN, Answer.NO, method="cocycle",
            obstruction=[(names[i], 1) for i in res.certificate], pairing=HALF,
        )
    names, rows, rhs, ncols = _oracle_named_system(G, kind)
    res = torus_solve_sparse(rows, rhs, ncols)
    size = ncols - n
    if res.consistent:
        return StructureVerdict(
            Kind.SPINC, Answer.YES, method="cocycle",
            witness={"z_all": res.solution[:size], "zeta": res.solution[size:]},
        )
    answer, b2 = _spinc_answer_when_blocked(G)
    return StructureVerdict(
        Kind.SPINC, answer, method="cocycle",
        obstruction=[(names[i], c) for i, c in res.certificate.items()],
        pairing=res.pairing, betti2=b2,
    )

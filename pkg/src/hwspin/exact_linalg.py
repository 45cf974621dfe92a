"""Exact integer / rational linear algebra.

Everything here works over Python integers and :class:`fractions.Fraction`,
so nothing ever rounds.  Three solvers are provided:

* :func:`f2_solve` -- Gaussian elimination over the field with two elements,
  returning a solution plus kernel basis, or a certificate of inconsistency;
* :func:`smith_normal_form` / :func:`left_kernel_basis` -- unimodular
  diagonalisation of integer matrices;
* :func:`torus_solve` -- linear systems ``A x = b`` with integer ``A`` whose
  unknowns and right-hand sides live in the circle group ``R/Z``.

Matrices are plain lists of lists of ints.  Angles are fractions in
``[0, 1)``; the multiplicative value of an angle ``q`` is ``exp(2*pi*i*q)``
so ``-1`` is the angle ``1/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

IntMatrix = list[list[int]]

HALF = Fraction(1, 2)


class DimensionError(ValueError):
    """Raised when matrix and vector shapes do not line up."""


def frac_mod1(q) -> Fraction:
    """Reduce a rational to its representative in [0, 1)."""
    q = Fraction(q)
    return q - (q.numerator // q.denominator)


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMatrix, B: IntMatrix, inner: Optional[int] = None) -> IntMatrix:
    if inner is None:
        inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(row[k] * B[k][j] for k in range(inner)) for j in range(cols)] for row in A]


def determinant(A: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _ncols(A: Sequence[Sequence[int]], ncols: Optional[int]) -> int:
    if ncols is not None:
        for r in A:
            if len(r) != ncols:
                raise DimensionError(f"row of length {len(r)}, expected {ncols}")
        return ncols
    if not A:
        raise DimensionError("ncols is required for a matrix with no rows")
    width = len(A[0])
    for r in A:
        if len(r) != width:
            raise DimensionError("ragged matrix")
    return width


# ---------------------------------------------------------------------------
# F_2

@dataclass
class F2Result:
    """Outcome of :func:`f2_solve`.

    When ``consistent`` is true, ``solution`` solves the system and ``kernel``
    spans its homogeneous solutions.  Otherwise ``certificate`` lists the
    indices of rows whose sum has zero left-hand side and right-hand side 1.
    """

    consistent: bool
    solution: Optional[list[int]] = None
    kernel: list[list[int]] = field(default_factory=list)
    certificate: Optional[list[int]] = None


def _bits_to_list(x: int, n: int) -> list[int]:
    return [(x >> k) & 1 for k in range(n)]


def f2_solve_bits(rows: Sequence[int], rhs: Sequence[int], ncols: int) -> F2Result:
    """:func:`f2_solve` on rows packed as bit masks (bit ``k`` is column ``k``).

    Maintains a reduced row echelon basis, so each incoming row is cleared by
    at most one XOR per pivot it touches.  Row combinations are tracked only
    for basis rows and materialised for the first inconsistent row.
    """
    if len(rows) != len(rhs):
        raise DimensionError(f"{len(rows)} rows but {len(rhs)} right-hand sides")
    basis: dict[int, list] = {}  # pivot column -> [row bits, rhs bit, combo bits]
    pivmask = 0
    for idx, (row, b) in enumerate(zip(rows, rhs)):
        row &= (1 << ncols) - 1
        b &= 1
        used = 0
        hit = row & pivmask
        while hit:
            low = hit & -hit
            entry = basis[low.bit_length() - 1]
            row ^= entry[0]
            b ^= entry[1]
            used ^= low
            hit ^= low
        if row == 0:
            if b:
                combo = 1 << idx
                while used:
                    low = used & -used
                    combo ^= basis[low.bit_length() - 1][2]
                    used ^= low
                return F2Result(False, certificate=[k for k in range(idx + 1) if (combo >> k) & 1])
            continue
        combo = 1 << idx
        u = used
        while u:
            low = u & -u
            combo ^= basis[low.bit_length() - 1][2]
            u ^= low
        low = row & -row
        col = low.bit_length() - 1
        for entry in basis.values():
            if entry[0] & low:
                entry[0] ^= row
                entry[1] ^= b
                entry[2] ^= combo
        basis[col] = [row, b, combo]
        pivmask |= low

    solution = 0
    for col, (row, b, _) in basis.items():
        if b:
            solution |= 1 << col
    kernel = []
    for free in range(ncols):
        if (pivmask >> free) & 1:
            continue
        vec = 1 << free
        for col, (row, _, _) in basis.items():
            if (row >> free) & 1:
                vec |= 1 << col
        kernel.append(_bits_to_list(vec, ncols))
    return F2Result(True, solution=_bits_to_list(solution, ncols), kernel=kernel)


def f2_solve(A: Sequence[Sequence[int]], b: Sequence[int], ncols: Optional[int] = None) -> F2Result:
    """Solve ``A x = b`` over F_2.

    Entries are reduced mod 2.  Free variables are set to zero in the
    returned solution.  An inconsistent system yields a certificate ``u``
    (as a sorted list of row indices) with ``u A = 0`` and ``u b = 1``.

    >>> f2_solve([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 0, 1]).solution
    [1, 0, 1]
    """
    n = _ncols(A, ncols)
    if len(A) != len(b):
        raise DimensionError(f"{len(A)} rows but {len(b)} right-hand sides")
    packed = [sum(1 << k for k, v in enumerate(r) if v % 2) for r in A]
    return f2_solve_bits(packed, [v % 2 for v in b], n)


# ---------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        k = min(len(self.D), len(self.D[0]) if self.D else 0)
        return [self.D[i][i] for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A: Sequence[Sequence[int]], ncols: Optional[int] = None) -> SnfDecomposition:
    """Smith normal form with transformation matrices.

    The pivot at every step is the nonzero entry of smallest absolute value
    in the remaining block, ties going to the lowest row and then the lowest
    column, so the output is a deterministic function of ``A``.  Diagonal
    entries are nonnegative and each divides the next.
    """
    m = len(A)
    n = _ncols(A, ncols) if m else (ncols or 0)
    D = [[int(x) for x in r] for r in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q:
            rd, rs = D[dst], D[src]
            for k in range(n):
                if rs[k]:
                    rd[k] += q * rs[k]
            ud, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ud[k] += q * us[k]

    def add_col(dst, src, q):
        if q:
            for r in D:
                if r[src]:
                    r[dst] += q * r[src]
            for r in V:
                if r[src]:
                    r[dst] += q * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
            # a nonzero remainder becomes the new, smaller pivot
            rem = None
            for i in range(t + 1, m):
                if D[i][t] and (rem is None or abs(D[i][t]) < rem[0]):
                    rem = (abs(D[i][t]), i, None)
            for j in range(t + 1, n):
                if D[t][j] and (rem is None or abs(D[t][j]) < rem[0]):
                    rem = (abs(D[t][j]), None, j)
            if rem is not None:
                done = False
                if rem[1] is not None:
                    swap_rows(t, rem[1])
                else:
                    swap_cols(t, rem[2])
                continue
            # divisibility: fold an offending row into the pivot row
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is not None:
                add_row(t, bad, 1)
                done = False
                continue
            if done:
                break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return SnfDecomposition(U, D, V)


def invariant_factors(A: Sequence[Sequence[int]], ncols: Optional[int] = None) -> list[int]:
    """Nonzero diagonal entries of the Smith form of ``A``."""
    return [d for d in smith_normal_form(A, ncols).diagonal if d]


def left_kernel_basis(A: Sequence[Sequence[int]], ncols: Optional[int] = None) -> list[list[int]]:
    """A Z-basis of ``{u : u A = 0}``, read off the rows of ``U`` past the rank.

    Each basis vector is sign-normalised so its first nonzero entry is
    positive.
    """
    snf = smith_normal_form(A, ncols)
    out = []
    for row in snf.U[snf.rank:]:
        lead = next((x for x in row if x), 0)
        out.append([-x for x in row] if lead < 0 else list(row))
    return out


# ---------------------------------------------------------------------------
# circle group


@dataclass
class TorusResult:
    """Outcome of :func:`torus_solve`.

    ``solution`` holds angles in [0, 1) when the system is solvable.
    Otherwise ``certificate`` is an integer vector ``u`` over the rows with
    ``u A = 0`` and ``u b`` not an integer; ``pairing`` is ``u b`` mod 1.
    """

    consistent: bool
    solution: Optional[list[Fraction]] = None
    certificate: Optional[dict[int, int]] = None
    pairing: Optional[Fraction] = None

    def certificate_vector(self, nrows: int) -> list[int]:
        u = [0] * nrows
        for k, v in (self.certificate or {}).items():
            u[k] = v
        return u


class _Combo:
    """Lazy integer combination of input rows.

    Combinations are built by scaling and adding earlier ones; they are
    only expanded when a certificate is actually needed, which keeps large
    redundant systems cheap.
    """

    __slots__ = ("terms", "_cache")

    def __init__(self, terms):
        self.terms = terms  # list of (coef, int row index | _Combo)
        self._cache = None

    @classmethod
    def leaf(cls, idx: int) -> "_Combo":
        return cls([(1, idx)])

    def expand(self) -> dict[int, int]:
        # iterative post-order so deep chains do not hit the recursion limit
        stack = [(self, False)]
        while stack:
            node, ready = stack.pop()
            if node._cache is not None:
                continue
            if ready:
                acc: dict[int, int] = {}
                for c, t in node.terms:
                    if isinstance(t, int):
                        acc[t] = acc.get(t, 0) + c
                    else:
                        for k, v in t._cache.items():
                            acc[k] = acc.get(k, 0) + c * v
                node._cache = {k: v for k, v in acc.items() if v}
            else:
                stack.append((node, True))
                for _, t in node.terms:
                    if not isinstance(t, int) and t._cache is None:
                        stack.append((t, False))
        return self._cache


def _axpy(row: dict, q: int, other: dict) -> None:
    """row += q * other, in place, dropping zeros."""
    for k, v in other.items():
        nv = row.get(k, 0) + q * v
        if nv:
            row[k] = nv
        else:
            row.pop(k, None)


def _certificate(cert: dict[int, int], pairing: Fraction) -> TorusResult:
    # sign-normalise: lowest row index carries a positive coefficient
    cert = dict(sorted(cert.items()))
    if cert and next(iter(cert.values())) < 0:
        cert = {k: -v for k, v in cert.items()}
        pairing = frac_mod1(-pairing)
    return TorusResult(False, certificate=cert, pairing=pairing)


def torus_solve_sparse(rows: Sequence[dict[int, int]], rhs: Sequence, ncols: int) -> TorusResult:
    """:func:`torus_solve` on sparse rows ``{column: coefficient}``.

    Unknowns carrying a unit coefficient are eliminated first with a
    reduced echelon basis (unimodular row operations, so the solution set
    over R/Z is unchanged and every pivot equation can be met by choosing
    its pivot unknown).  What remains involves only non-pivot columns; it
    is deduplicated and handed to the Smith-form solver.
    """
    if len(rows) != len(rhs):
        raise DimensionError(f"{len(rows)} rows but {len(rhs)} right-hand sides")
    pivots: dict[int, list] = {}  # column -> [row, rhs, combo]
    occurs: dict[int, set] = {}  # non-pivot column -> pivot columns whose row mentions it
    residual: list[list] = []  # [row, rhs, combo]

    def reduce(row, b, combo):
        terms = None
        for col in [c for c in row if c in pivots]:
            q = row.get(col, 0)
            if not q:
                continue
            prow, pb, pcombo = pivots[col]
            _axpy(row, -q, prow)
            b = b - q * pb
            if terms is None:
                terms = [(1, combo)]
            terms.append((-q, pcombo))
        if terms is not None:
            combo = _Combo(terms)
        return row, frac_mod1(b), combo

    def install(col, row, b, combo):
        # normalise the pivot coefficient to +1
        if row[col] == -1:
            row = {k: -v for k, v in row.items()}
            b = -b
            combo = _Combo([(-1, combo)])
        b = frac_mod1(b)
        for pc in sorted(occurs.get(col, ())):
            prow, pb, pcombo = pivots[pc]
            q = prow[col]
            for k in prow:
                if k != pc and k in occurs:
                    occurs[k].discard(pc)
            _axpy(prow, -q, row)
            pivots[pc] = [prow, frac_mod1(pb - q * b), _Combo([(1, pcombo), (-q, combo)])]
            for k in prow:
                if k != pc:
                    occurs.setdefault(k, set()).add(pc)
        occurs.pop(col, None)
        pivots[col] = [row, b, combo]
        for k in row:
            if k != col:
                occurs.setdefault(k, set()).add(col)

    for idx, (r, b) in enumerate(zip(rows, rhs)):
        row = {k: int(v) for k, v in r.items() if v}
        for k in row:
            if not 0 <= k < ncols:
                raise DimensionError(f"column {k} out of range for {ncols} columns")
        row, b, combo = reduce(row, Fraction(b), _Combo.leaf(idx))
        if not row:
            if b:
                return _certificate(combo.expand(), b)
            continue
        unit = next((c for c in sorted(row) if abs(row[c]) == 1), None)
        if unit is None:
            residual.append([row, b, combo])
            continue
        install(unit, row, b, combo)
        # residual rows may mention new pivot columns; repeat until stable
        changed = True
        while changed:
            changed = False
            keep = []
            for rr, rb, rc in residual:
                if not changed and any(c in pivots for c in rr):
                    rr, rb, rc = reduce(rr, rb, rc)
                    if not rr:
                        if rb:
                            return _certificate(rc.expand(), rb)
                        continue
                    u2 = next((c for c in sorted(rr) if abs(rr[c]) == 1), None)
                    if u2 is not None:
                        install(u2, rr, rb, rc)
                        changed = True
                        continue
                keep.append([rr, rb, rc])
            residual = keep

    # residual system on non-pivot columns
    free_cols = [c for c in range(ncols) if c not in pivots]
    pos = {c: i for i, c in enumerate(free_cols)}
    seen: dict = {}
    dense: list[list[int]] = []
    dense_rhs: list[Fraction] = []
    dense_combo: list[_Combo] = []
    for rr, rb, rc in residual:
        key = (tuple(sorted(rr.items())), rb)
        if key in seen:
            continue
        seen[key] = len(dense)
        vec = [0] * len(free_cols)
        for k, v in rr.items():
            vec[pos[k]] = v
        dense.append(vec)
        dense_rhs.append(rb)
        dense_combo.append(rc)

    y = [Fraction(0)] * len(free_cols)
    if dense:
        sub = _torus_solve_snf(dense, dense_rhs, len(free_cols))
        if not sub.consistent:
            terms = [(c, dense_combo[i]) for i, c in sub.certificate.items()]
            return _certificate(_Combo(terms).expand(), sub.pairing)
        y = sub.solution

    x = [Fraction(0)] * ncols
    for c, v in zip(free_cols, y):
        x[c] = v
    for col, (prow, pb, _) in pivots.items():
        x[col] = frac_mod1(pb - sum(v * x[k] for k, v in prow.items() if k != col))
    return TorusResult(True, solution=x)


def _torus_solve_snf(A: IntMatrix, b: Sequence[Fraction], ncols: int) -> TorusResult:
    """Solve ``A x = b`` in R/Z through the Smith form ``U A V = D``.

    With ``y = V^{-1} x`` the system decouples into ``d_i y_i = (U b)_i``.
    Rows with ``d_i = 0`` must have integral right-hand side (their row of
    ``U`` is the certificate otherwise); the rest are divided out, and free
    coordinates of ``y`` are set to zero.
    """
    snf = smith_normal_form(A, ncols)
    Ub = [sum(u * q for u, q in zip(urow, b)) for urow in snf.U]
    r = snf.rank
    for i in range(r, len(A)):
        val = frac_mod1(Ub[i])
        if val:
            return _certificate({k: v for k, v in enumerate(snf.U[i]) if v}, val)
    y = [Fraction(0)] * ncols
    for i in range(r):
        y[i] = Fraction(Ub[i]) / snf.D[i][i]
    x = [frac_mod1(sum(snf.V[k][j] * y[j] for j in range(ncols))) for k in range(ncols)]
    return TorusResult(True, solution=x)


def torus_solve(A: Sequence[Sequence[int]], b: Sequence, ncols: Optional[int] = None) -> TorusResult:
    """Solve ``A x = b`` with integer ``A`` and unknowns in the circle R/Z.

    The circle is divisible, so the system is solvable exactly when
    ``u . b`` is an integer for every integer ``u`` with ``u A = 0``.  A
    failing ``u`` is returned as the certificate.  The returned solution
    takes every free parameter to be zero.

    >>> torus_solve([[2]], [Fraction(1, 2)]).solution
    [Fraction(1, 4)]
    """
    n = _ncols(A, ncols)
    if len(A) != len(b):
        raise DimensionError(f"{len(A)} rows but {len(b)} right-hand sides")
    sparse = [{k: v for k, v in enumerate(r) if v} for r in A]
    return torus_solve_sparse(sparse, [frac_mod1(q) for q in b], n)


def check_torus_solution(A: Sequence[Sequence[int]], b: Sequence, x: Sequence) -> bool:
    return all(frac_mod1(sum(a * xi for a, xi in zip(row, x)) - bi) == 0 for row, bi in zip(A, b))


def check_torus_certificate(A: Sequence[Sequence[int]], b: Sequence, u: dict[int, int], ncols: int) -> bool:
    """True iff ``u A = 0`` exactly and ``u b`` is not an integer."""
    total = [0] * ncols
    for i, c in u.items():
        for k, v in enumerate(A[i]):
            total[k] += c * v
    return not any(total) and frac_mod1(sum(c * Fraction(b[i]) for i, c in u.items())) != 0

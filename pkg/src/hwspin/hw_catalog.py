"""Named groups and enumeration of Hantzsche-Wendt candidates.

An HW candidate in dimension n (odd) has generators ``(B_i, b_i)`` for
``i = 1..n-1`` with ``B_i = diag(-1, ..., 1 (at i), ..., -1)`` and every
``b_i`` in ``{0, 1/2}^n``.  Translations are packed as bit masks of the
half-coordinates, which makes the torsion test a handful of XORs: modulo
``Z^n`` the translation of a product is the XOR of the factors' masks,
because negating 1/2 gives 1/2 again mod 1.
"""

from __future__ import annotations

import random
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .crystal import AffineElement, BieberbachGroup, GroupValidationError, build_group, is_torsion_free

HALF = Fraction(1, 2)

EXHAUSTIVE_LIMIT = 5  # largest n for which exhaustive enumeration is allowed


class ResourceGuardError(RuntimeError):
    """The requested computation is refused as too large."""


def hw_rotation(n: int, i: int) -> tuple[int, ...]:
    """``B_i`` (1-based ``i``) as a sign vector."""
    return tuple(1 if k == i - 1 else -1 for k in range(n))


@dataclass(frozen=True)
class HwSpec:
    n: int
    b_rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.n % 2 == 0 or self.n < 3:
            raise ValueError(f"HW dimension must be odd and >= 3, got {self.n}")
        rows = tuple(tuple(Fraction(x) for x in r) for r in self.b_rows)
        if len(rows) != self.n - 1:
            raise ValueError(f"need {self.n - 1} translation rows, got {len(rows)}")
        for i, r in enumerate(rows):
            if len(r) != self.n:
                raise ValueError(f"row {i + 1} has length {len(r)}, expected {self.n}")
            for k, x in enumerate(r):
                if x not in (0, HALF):
                    raise ValueError(f"row {i + 1}, entry {k + 1}: {x} not in {{0, 1/2}}")
        object.__setattr__(self, "b_rows", rows)

    @classmethod
    def from_masks(cls, n: int, masks: Sequence[int]) -> "HwSpec":
        return cls(n, tuple(tuple(HALF if (mk >> k) & 1 else Fraction(0) for k in range(n)) for mk in masks))

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << k for k, x in enumerate(r) if x) for r in self.b_rows)

    def generators(self) -> list[AffineElement]:
        return [AffineElement(hw_rotation(self.n, i + 1), r) for i, r in enumerate(self.b_rows)]


def hw_from_spec(spec: HwSpec, name: Optional[str] = None) -> BieberbachGroup:
    """Build and validate; torsion is rejected with the offending element."""
    G = build_group(spec.n, spec.generators(), name=name)
    check = is_torsion_free(G)
    if not check:
        raise GroupValidationError(f"group has torsion: {check.witness} has order 2", witness=check.witness)
    return G


def cyclic_generators(n: int) -> list[AffineElement]:
    if n % 2 == 0 or n < 3:
        raise ValueError(f"cyclic HW groups need odd n >= 3, got {n}")
    gens = []
    for i in range(1, n):
        b = [Fraction(0)] * n
        b[i - 1] = HALF
        b[i] = HALF
        gens.append(AffineElement(hw_rotation(n, i), tuple(b)))
    # b_n = (b_1 ... b_{n-1})^{-1} up to the lattice vector e_n; the printed
    # form (B_n, (1/2, 0, ..., 0, -1/2)) is used and build_group checks membership
    b = [Fraction(0)] * n
    b[0], b[-1] = HALF, -HALF
    gens.append(AffineElement(hw_rotation(n, n), tuple(b)))
    return gens


def cyclic_hw(n: int) -> BieberbachGroup:
    """The cyclic HW group: ``b_i = e_i/2 + e_{i+1}/2`` for i < n, plus the dependent ``b_n``."""
    G = build_group(n, cyclic_generators(n), name=f"cyclic-hw-{n}")
    check = is_torsion_free(G)
    if not check:
        raise GroupValidationError(f"cyclic construction has torsion at n={n}", witness=check.witness)
    return G


def hw_5_1() -> BieberbachGroup:
    """The five-dimensional HW group with CARAT number 1-th 219.1.1."""
    h = HALF
    gens = [
        AffineElement((1, 1, 1, -1, -1), (0, 0, h, h, 0)),
        AffineElement((1, 1, -1, -1, 1), (0, h, 0, 0, 0)),
        AffineElement((-1, 1, 1, -1, 1), (0, 0, 0, 0, h)),
        AffineElement((1, -1, -1, 1, 1), (h, 0, 0, 0, 0)),
    ]
    return build_group(5, gens, name="hw-5-1")


def torus(n: int) -> BieberbachGroup:
    if n < 1:
        raise ValueError("torus dimension must be positive")
    return build_group(n, [], name=f"torus-{n}")


CARAT_LABELS = {"hw-5-1": "1-th 219.1.1", "cyclic-hw-5": "2-th 219.1.1"}


def catalog_names() -> list[str]:
    return ["cyclic-hw-<n>", "hw-5-1", "hw-5-2", "torus-<n>"]


def from_catalog(name: str) -> BieberbachGroup:
    """Resolve ``cyclic-hw-<n>``, ``hw-5-1``, ``hw-5-2`` or ``torus-<n>``."""
    if name == "hw-5-1":
        return hw_5_1()
    if name == "hw-5-2":
        G = cyclic_hw(5)
        G.name = "hw-5-2"
        return G
    m = re.fullmatch(r"cyclic-hw-(\d+)", name)
    if m:
        return cyclic_hw(int(m.group(1)))
    m = re.fullmatch(r"torus-(\d+)", name)
    if m:
        return torus(int(m.group(1)))
    raise KeyError(f"unknown catalog name {name!r}; known: {', '.join(catalog_names())}")


def labels(G: BieberbachGroup) -> list[str]:
    name = G.name or ""
    out = []
    key = "cyclic-hw-5" if name == "hw-5-2" else name
    if key in CARAT_LABELS:
        out.append(f"CARAT {CARAT_LABELS[key]}")
    if name.startswith("cyclic-hw-") or name == "hw-5-2":
        out.append("cyclic HW")
    return out


# ---------------------------------------------------------------------------
# enumeration


def _span_tables(n: int, masks: Sequence[int]) -> tuple[list[int], list[int]]:
    """Negation and half-translation masks for every element of the span."""
    full = (1 << n) - 1
    negs = [0]
    trs = [0]
    for i, mk in enumerate(masks):
        neg = full ^ (1 << i)
        negs = negs + [x ^ neg for x in negs]
        trs = trs + [x ^ mk for x in trs]
    return negs, trs


def is_torsion_free_masks(n: int, masks: Sequence[int]) -> bool:
    """Fast torsion test for an HW candidate given as half-translation masks.

    Class ``a`` has an element of finite order iff its translation is
    integral on the coordinates its rotation fixes.
    """
    full = (1 << n) - 1
    negs, trs = _span_tables(n, masks)
    return all(trs[a] & ~negs[a] & full for a in range(1, len(negs)))


def _extends(n: int, negs: list[int], trs: list[int], row_index: int, mk: int) -> bool:
    full = (1 << n) - 1
    neg = full ^ (1 << row_index)
    return all((t ^ mk) & ~(g ^ neg) & full for g, t in zip(negs, trs))


def _exhaustive_chunk(args) -> list[tuple[int, ...]]:
    n, start, stop = args
    width = n
    mask = (1 << width) - 1
    out = []
    for idx in range(start, stop):
        rows = tuple((idx >> (width * (n - 2 - i))) & mask for i in range(n - 1))
        if is_torsion_free_masks(n, rows):
            out.append(rows)
    return out


def exhaustive_masks(n: int, workers: int = 1, chunks: int = 64) -> Iterator[tuple[int, ...]]:
    """All torsion-free HW candidates in lexicographic order of their rows.

    With ``workers > 1`` the index range is split into contiguous chunks
    evaluated in parallel; results are merged in chunk order, so the
    output is identical to the single-process order.
    """
    if n % 2 == 0 or n < 3:
        raise ValueError(f"HW dimension must be odd and >= 3, got {n}")
    if n > EXHAUSTIVE_LIMIT:
        total = 2 ** (n * (n - 1))
        raise ResourceGuardError(
            f"exhaustive enumeration at n={n} means {total} candidates; "
            f"only n <= {EXHAUSTIVE_LIMIT} is supported, use sampling instead"
        )
    total = 1 << (n * (n - 1))
    step = -(-total // chunks)
    tasks = [(n, s, min(s + step, total)) for s in range(0, total, step)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_exhaustive_chunk, tasks):
                yield from part
    else:
        for t in tasks:
            yield from _exhaustive_chunk(t)


def sample_masks(n: int, count: int, seed: int, max_restarts: int = 10_000) -> list[tuple[int, ...]]:
    """``count`` distinct torsion-free HW candidates, reproducible from ``seed``.

    Rows are drawn by a randomised depth-first search that only extends
    torsion-free prefixes (a subgroup of a torsion-free group is
    torsion-free).  The draw is not uniform over candidates.
    """
    if n % 2 == 0 or n < 3:
        raise ValueError(f"HW dimension must be odd and >= 3, got {n}")
    rng = random.Random(seed)
    found: list[tuple[int, ...]] = []
    seen: set = set()
    restarts = 0
    while len(found) < count:
        rows = _random_dfs(n, rng)
        if rows is None or rows in seen:
            restarts += 1
            if restarts > max_restarts:
                raise ResourceGuardError(f"could not find {count} distinct candidates at n={n}")
            continue
        seen.add(rows)
        found.append(rows)
    return found


def _random_dfs(n: int, rng: random.Random) -> Optional[tuple[int, ...]]:
    # iterative DFS; each level tries candidate rows in a random order
    order0 = list(range(1 << n))
    rng.shuffle(order0)
    stack = [(order0, 0)]
    chosen: list[int] = []
    tables = [([0], [0])]
    budget = 1 << 16
    while stack:
        budget -= 1
        if budget < 0:
            return None
        order, pos = stack[-1]
        if pos >= len(order):
            stack.pop()
            if chosen:
                chosen.pop()
                tables.pop()
            continue
        stack[-1] = (order, pos + 1)
        mk = order[pos]
        level = len(chosen)
        negs, trs = tables[-1]
        if not _extends(n, negs, trs, level, mk):
            continue
        chosen.append(mk)
        if len(chosen) == n - 1:
            return tuple(chosen)
        neg = ((1 << n) - 1) ^ (1 << level)
        tables.append((negs + [g ^ neg for g in negs], trs + [t ^ mk for t in trs]))
        nxt = list(range(1 << n))
        rng.shuffle(nxt)
        stack.append((nxt, 0))
    return None


def enumerate_hw(
    n: int,
    mode: str = "exhaustive",
    count: int = 100,
    seed: int = 0,
    workers: int = 1,
) -> Iterator[BieberbachGroup]:
    """Stream validated HW groups.

    ``mode="exhaustive"`` walks every candidate in lexicographic order (only
    n <= 5); ``mode="sample"`` draws ``count`` distinct candidates from
    ``seed``.  Duplicates are judged on generator data mod Z^n only, so
    affinely equivalent groups are all reported (the enumerator over-counts
    manifolds).
    """
    if mode == "exhaustive":
        source = exhaustive_masks(n, workers=workers)
    elif mode == "sample":
        source = iter(sample_masks(n, count, seed))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for rows in source:
        spec = HwSpec.from_masks(n, rows)
        yield hw_from_spec(spec, name=spec_name(spec))


def spec_name(spec: HwSpec) -> str:
    return f"hw-{spec.n}-rows-" + "-".join(format(mk, f"0{spec.n}b")[::-1] for mk in spec.masks)

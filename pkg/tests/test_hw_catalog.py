from fractions import Fraction

import pytest

from hwspin.crystal import AffineElement, GroupValidationError, is_hw
from hwspin.hw_catalog import (
    HwSpec,
    ResourceGuardError,
    cyclic_hw,
    enumerate_hw,
    exhaustive_masks,
    from_catalog,
    hw_5_1,
    hw_from_spec,
    is_torsion_free_masks,
    labels,
    sample_masks,
    torus,
)
from hwspin.crystal import build_group, is_torsion_free
from hwspin.lifting import Answer, decide_spinc

h = Fraction(1, 2)


def test_cyclic5_last_generator():
    G = cyclic_hw(5)
    assert G.generators[4] == AffineElement((-1, -1, -1, -1, 1), (h, 0, 0, 0, -h))
    assert is_hw(G)


def test_cyclic7_is_hw():
    assert is_hw(cyclic_hw(7))


@pytest.mark.parametrize("n", [4, 1, 2])
def test_cyclic_rejects_bad_n(n):
    with pytest.raises(ValueError):
        cyclic_hw(n)


def test_hw_5_1():
    G = hw_5_1()
    assert G.generators[2] == AffineElement((-1, 1, 1, -1, 1), (0, 0, 0, 0, h))
    assert G.generators[0] == AffineElement((1, 1, 1, -1, -1), (0, 0, h, h, 0))
    assert is_hw(G) and G.holonomy_order == 16


def test_spec_of_cyclic5_equals_cyclic5():
    G = cyclic_hw(5)
    spec = HwSpec(5, [g.translation for g in G.generators[:4]])
    assert hw_from_spec(spec).generators == G.generators[:4]


def test_zero_spec_rejected():
    with pytest.raises(GroupValidationError) as info:
        hw_from_spec(HwSpec(5, [(0,) * 5] * 4))
    assert info.value.witness == AffineElement((1, -1, -1, -1, -1), (0,) * 5)


def test_spec_validation():
    with pytest.raises(ValueError):
        HwSpec(5, [(0,) * 5] * 3)
    with pytest.raises(ValueError):
        HwSpec(5, [(Fraction(1, 4),) + (0,) * 4] + [(0,) * 5] * 3)
    with pytest.raises(ValueError):
        HwSpec(6, [(0,) * 6] * 5)


def test_mask_roundtrip():
    spec = HwSpec.from_masks(5, (3, 6, 12, 24))
    assert spec.masks == (3, 6, 12, 24)
    assert spec.b_rows[0] == (h, h, 0, 0, 0)


def test_catalog_names():
    assert from_catalog("hw-5-2").generators == cyclic_hw(5).generators
    assert from_catalog("cyclic-hw-9").n == 9
    assert from_catalog("torus-3").rank == 0
    with pytest.raises(KeyError):
        from_catalog("hw-7-1")
    assert "CARAT 1-th 219.1.1" in labels(hw_5_1())
    assert "CARAT 2-th 219.1.1" in labels(from_catalog("hw-5-2"))
    assert labels(torus(2)) == []


def test_gamma1_and_gamma2_not_duplicates():
    a = {g.normalized() for g in hw_5_1().generators}
    b = {g.normalized() for g in cyclic_hw(5).generators[:4]}
    assert a != b


def test_mask_torsion_test_matches_group_test():
    import random

    rng = random.Random(0)
    for _ in range(200):
        rows = tuple(rng.randrange(32) for _ in range(4))
        G = build_group(5, HwSpec.from_masks(5, rows).generators())
        assert is_torsion_free_masks(5, rows) == bool(is_torsion_free(G))


def test_exhaustive_n3():
    masks = list(exhaustive_masks(3))
    assert masks == sorted(masks, key=lambda r: tuple(r))
    assert len(masks) == len(set(masks))
    assert (3, 6) in masks  # the cyclic construction at n = 3
    groups = list(enumerate_hw(3))
    assert len(groups) == len(masks)
    assert all(is_hw(G) for G in groups)


def test_exhaustive_parallel_same_order():
    assert list(exhaustive_masks(3, workers=2, chunks=8)) == list(exhaustive_masks(3))


def test_exhaustive_guard():
    with pytest.raises(ResourceGuardError):
        list(exhaustive_masks(7))


def test_sample_reproducible():
    a = sample_masks(7, 100, seed=1)
    assert a == sample_masks(7, 100, seed=1)
    assert len(set(a)) == 100
    assert a != sample_masks(7, 100, seed=2)
    assert all(is_torsion_free_masks(7, r) for r in a)


def test_sampled_groups_are_hw():
    for G in enumerate_hw(7, mode="sample", count=10, seed=3):
        assert is_hw(G)


def test_random_n5_spec_spinc_no():
    (G,) = enumerate_hw(5, mode="sample", count=1, seed=12)
    assert decide_spinc(G).answer is Answer.NO


def test_unknown_mode():
    with pytest.raises(ValueError):
        list(enumerate_hw(5, mode="bogus"))

import itertools

import numpy as np
import pytest

from replaylearn.dimensions import (
    CertificateError,
    WitnessSet,
    chain_depth,
    closure_threshold_dimension,
    dimension_report,
    extended_threshold_dimension,
    find_vcd1_representation,
    littlestone_dimension,
    littlestone_dimension_naive,
    shatters,
    threshold_dimension,
    vc_dimension,
    verify_vcd1_representation,
)
from replaylearn.hypotheses import (
    HypothesisClass,
    apply_representation,
    blowup,
    intersection_closure,
    intervals,
    is_intersection_closed,
    power_set,
    random_class,
    reverse_singletons,
    singletons,
    thresholds,
    two_intervals,
)

from conftest import brute_closure, brute_tdim, cls, random_classes


def brute_vc(H):
    best = 0
    for k in range(1, H.n + 1):
        if any(len({tuple((m >> x) & 1 for x in S) for m in H.masks}) == 2 ** k
               for S in itertools.combinations(range(H.n), k)):
            best = k
        else:
            break
    return best


def test_vc_examples():
    assert vc_dimension(thresholds(8)) == 1
    assert vc_dimension(power_set(4)) == 4
    assert vc_dimension(two_intervals(8)) == 4
    assert vc_dimension(intervals(6)) == 2


def test_vc_matches_brute_force():
    for H in random_classes(60, 6, 16, seed=1):
        assert vc_dimension(H) == brute_vc(H)


def test_shatters():
    H = thresholds(4)
    assert shatters(H, 0b0100)
    assert not shatters(H, 0b0101)


def test_littlestone_examples():
    assert littlestone_dimension(thresholds(8)) == 3
    assert littlestone_dimension(HypothesisClass.from_masks(3, [5])) == 0
    assert littlestone_dimension(power_set(3)) == 3


def test_littlestone_memo_matches_naive():
    for H in random_classes(80, 5, 12, seed=2):
        assert littlestone_dimension(H) == littlestone_dimension_naive(H)


def test_threshold_dimension_thresholds():
    for n in (1, 3, 8):
        k, w = threshold_dimension(thresholds(n))
        assert k == n
        # witness points are N, N-1, ..., 1 in 1-based terms
        assert w.points == tuple(range(n - 1, -1, -1))
        assert w.verify(thresholds(n))


def test_threshold_dimension_routes_agree():
    H = thresholds(7)
    assert threshold_dimension(H, "chain")[0] == threshold_dimension(H, "search")[0] == 7
    with pytest.raises(ValueError):
        threshold_dimension(two_intervals(5), "chain")


def test_threshold_dimension_blowup_and_trivial():
    assert threshold_dimension(blowup(4))[0] == 3
    assert threshold_dimension(HypothesisClass.from_masks(3, [0]))[0] == 0


def test_threshold_search_matches_brute_force():
    for H in random_classes(60, 5, 10, seed=3):
        k, w = threshold_dimension(H, "search")
        assert k == brute_tdim(H.masks, H.n)
        assert w.verify(H)


def test_witness_verify_rejects_bad_certificates():
    H = thresholds(3)
    k, w = threshold_dimension(H)
    assert not WitnessSet(w.points[::-1], w.hypotheses).verify(H)
    assert not WitnessSet(w.points, w.hypotheses[:-1]).verify(H)


def test_chain_depth_examples():
    assert chain_depth(thresholds(6))[0] == 6
    antichain = HypothesisClass.from_masks(5, [1 << i for i in range(5)])
    assert chain_depth(antichain)[0] == 0


def test_depth_equals_tdim_on_closed_families():
    rng = np.random.default_rng(4)
    for _ in range(100):
        H = random_class(int(rng.integers(2, 7)), int(rng.integers(1, 7)), rng)
        F = intersection_closure(H).as_class()
        assert chain_depth(F)[0] == threshold_dimension(F, "search")[0]


def test_closure_threshold_dimension_matches_explicit_closure():
    for H in random_classes(60, 6, 8, seed=5):
        F = intersection_closure(H)
        k, w = closure_threshold_dimension(H)
        assert k == chain_depth(F)[0]
        assert set(h.mask for h in w.hypotheses) <= brute_closure(H.masks, H.n)


def test_extdim_blowup():
    ext = extended_threshold_dimension(blowup(4))
    assert ext.value >= 4
    assert ext.value == 5
    G = apply_representation(blowup(4), ext.representation)
    assert ext.witness.verify(intersection_closure(G))


def test_extdim_reverse_singletons():
    H = reverse_singletons(6)
    assert closure_threshold_dimension(H)[0] == 6
    ext = extended_threshold_dimension(H)
    assert ext.value <= 2
    G = apply_representation(H, H.domain.full)
    assert closure_threshold_dimension(G)[0] <= 2


def test_extdim_not_complement_symmetric():
    # the all-zero and all-one representations give different closure depths
    H = reverse_singletons(6)
    assert closure_threshold_dimension(H)[0] == 6
    assert closure_threshold_dimension(apply_representation(H, H.domain.full))[0] == 1


def test_extdim_matches_explicit_minimum():
    for H in random_classes(25, 5, 8, seed=6):
        values = [chain_depth(intersection_closure(apply_representation(H, f)))[0] for f in range(1 << H.n)]
        assert extended_threshold_dimension(H).value == min(values)


def test_extdim_at_most_tdim_when_closed():
    for H in random_classes(40, 6, 8, seed=7):
        F = intersection_closure(H).as_class()
        assert extended_threshold_dimension(F).value <= threshold_dimension(F)[0]


def test_vcd1_representation():
    assert verify_vcd1_representation(thresholds(8), 0)
    H = reverse_singletons(5)
    f = find_vcd1_representation(H)
    assert f is not None and f.mask == H.domain.full
    G = apply_representation(H, f)
    assert set(G.masks) == set(singletons(5).masks)
    assert find_vcd1_representation(two_intervals(5)) is None


def test_vcd1_representation_random():
    rng = np.random.default_rng(8)
    hits = 0
    for _ in range(200):
        H = random_class(5, int(rng.integers(2, 6)), rng)
        if vc_dimension(H) != 1:
            assert find_vcd1_representation(H) is None
            continue
        hits += 1
        f = find_vcd1_representation(H)
        assert f.mask in H.mask_set
        assert verify_vcd1_representation(H, f)
    assert hits > 10


def test_dimension_report_json():
    rep = dimension_report(thresholds(4))
    data = rep.to_json()
    assert data["vc"] == 1 and data["tdim"]["value"] == 4 and data["extdim"]["value"] <= 4
    with pytest.raises(ValueError):
        dimension_report(thresholds(4), ["bogus"])

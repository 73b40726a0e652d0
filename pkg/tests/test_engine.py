import json

import numpy as np
import pytest

from replaylearn.adversaries import (
    DescendingAdversary,
    MistakeSeekingAdversary,
    RandomReplayAdversary,
    ScriptedAdversary,
)
from replaylearn.engine import (
    TRUTH,
    ReliableState,
    RoundRecord,
    run_game,
    score,
    trap_region,
    trap_witness,
    update_reliable_state,
    worst_case_score,
)
from replaylearn.hypotheses import Hypothesis, random_class, thresholds
from replaylearn.learners import ClosureLearner, ConservativeThresholdLearner, GreedyProperLearner, HalvingLearner


class Fixed:
    """Learner that always emits the same hypothesis."""

    def __init__(self, h):
        self.h = h

    def step(self, observation=None):
        return self.h


def test_closure_vs_truth_two_rounds():
    H = thresholds(4)
    # 1-based (4,1), (3,1)
    tr = run_game(ClosureLearner(H), ScriptedAdversary([(3, 1, TRUTH), (2, 1, TRUTH)]), H, 2)
    assert tr.valid
    assert tr.mistakes == 2
    assert tr.state.reliable_indices == (1, 2)


def test_single_round_truth():
    H = thresholds(4)
    for x in range(4):
        for target in H.masks:
            tr = run_game(Fixed(H[2]), ScriptedAdversary([(x, (target >> x) & 1, TRUTH)]), H, 1, target=target)
            assert tr.mistakes == int(((H[2].mask >> x) & 1) != ((target >> x) & 1))


def test_replaying_first_hypothesis_learns_nothing():
    H = thresholds(4)
    h1 = H[3]
    target = H[1].mask
    moves = [(0, 1, TRUTH)] + [(x % 4, (h1.mask >> (x % 4)) & 1, 1) for x in range(1, 12)]
    tr = run_game(Fixed(h1), ScriptedAdversary(moves), H, 12, target=target)
    assert tr.valid
    # round 1 must be truthful; the rest are replays and never reliable
    assert set(tr.state.reliable_indices) <= {1}
    # a fixed learner only errs on the truthful round here
    assert tr.mistakes == int(h1(0) != 1)


def test_replaying_first_hypothesis_with_current_counted():
    H = thresholds(4)
    h1 = H[3]
    moves = [(3, 1, TRUTH)] + [(x % 4, (h1.mask >> (x % 4)) & 1, 1) for x in range(1, 8)]
    tr = run_game(Fixed(h1), ScriptedAdversary(moves), H, 8, include_current=True)
    assert tr.state.reliable_indices == ()
    assert set(tr.state.version_space) == set(H.masks)


def test_first_round_reliability_readings():
    H = thresholds(4)
    rec = RoundRecord(1, H[4].mask, 3, 1)
    s0 = ReliableState.initial(H)
    assert update_reliable_state(s0, rec).reliable_indices == (1,)
    assert update_reliable_state(s0, rec, include_current=True).reliable_indices == ()
    rec = RoundRecord(1, 0, 2, 1)
    s1 = update_reliable_state(s0, rec, include_current=True)
    assert s1.reliable_indices == (1,)
    assert set(s1.version_space) == {H[1].mask, H[2].mask, H[3].mask}


def test_matching_past_label_is_unreliable():
    H = thresholds(4)
    s = ReliableState.initial(H)
    s = update_reliable_state(s, RoundRecord(1, H[3].mask, 0, 0))
    before = s.version_space
    s = update_reliable_state(s, RoundRecord(2, 0, 3, 1))
    assert 2 not in s.reliable_indices and s.version_space == before


def test_round_order_enforced():
    H = thresholds(3)
    with pytest.raises(ValueError):
        update_reliable_state(ReliableState.initial(H), RoundRecord(2, 0, 0, 1))


def test_trap_region_example():
    H = thresholds(4)
    # VS* = {f_1, f_3}, past = {{}, {2,3,4}} in 1-based points
    vs = (0b1111, 0b1100)
    state = ReliableState(2, 0b1111, (1,), vs, (0, 0b1110), 0b1110, 0, 0b1111, 0b1100)
    assert trap_region(state) == 0b0010
    f0, f1, h0, h1 = trap_witness(state, 1)
    assert not (f0 >> 1) & 1 and (f1 >> 1) & 1 and not (h0 >> 1) & 1 and (h1 >> 1) & 1
    single = ReliableState(1, 0b1111, (), H.masks, (0b1110,), 0b1110, 0b1110, 0b1111, 0)
    assert trap_region(single) == 0


def test_scoring():
    H = thresholds(4)
    rounds = [RoundRecord(1, 0, 3, 1), RoundRecord(2, 0b1000, 2, 1)]
    assert score(rounds, H[1]) == 2
    assert score(rounds, H[4]) == 1
    assert worst_case_score(rounds, H.masks[1:3]) == (2, H[1].mask)
    assert score([RoundRecord(1, 0b1111, 1, 1)], 0b1111) == 0
    with pytest.raises(ValueError):
        worst_case_score(rounds, ())


def test_descending_game_scores_four():
    H = thresholds(4)
    tr = run_game(ClosureLearner(H), DescendingAdversary(4), H, 4, target=H[1])
    assert tr.mistakes == 4


def test_pigeonhole_on_alternating_trap_labels():
    H = thresholds(4)
    moves = [(1, 1, TRUTH)] + [(0, t % 2, TRUTH) for t in range(10)]
    tr = run_game(Fixed(H[4]), ScriptedAdversary(moves), H, 11)
    assert tr.mistakes >= 5


def test_illegal_replay_is_rejected():
    H = thresholds(4)
    tr = run_game(Fixed(H[4]), ScriptedAdversary([(3, 1, TRUTH), (0, 1, 1)]), H, 2)
    assert not tr.valid and "replay" in tr.violation
    tr = run_game(Fixed(H[4]), ScriptedAdversary([(0, 1, 1)]), H, 1)
    assert not tr.valid


def test_inconsistent_reliable_rounds_are_invalid():
    H = thresholds(4)
    tr = run_game(Fixed(H[2]), ScriptedAdversary([(0, 0, TRUTH), (3, 0, TRUTH)]), H, 2)
    # consistent: f_0 labels everything 0
    assert tr.valid
    tr = run_game(Fixed(H[0]), ScriptedAdversary([(3, 0, TRUTH), (0, 1, TRUTH)]), H, 2)
    assert not tr.valid


def test_committed_target_must_be_consistent():
    H = thresholds(4)
    tr = run_game(Fixed(H[0]), ScriptedAdversary([(3, 1, TRUTH)]), H, 1, target=H[0])
    assert not tr.valid


def test_transcript_json(tmp_path):
    H = thresholds(4)
    tr = run_game(ClosureLearner(H), ScriptedAdversary([(3, 1, TRUTH), (2, 1, TRUTH)]), H, 2)
    path = tmp_path / "t.json"
    tr.save(path)
    data = json.loads(path.read_text())
    assert data["mistakes"] == 2 and data["reliable_indices"] == [1, 2]
    assert data["rounds"][0]["source"] == "truth"


@pytest.mark.parametrize("learner_cls", [ClosureLearner, HalvingLearner, GreedyProperLearner])
def test_fuzz_invariants(learner_cls):
    rng = np.random.default_rng(21)
    for _ in range(40):
        H = random_class(6, int(rng.integers(2, 12)), rng)
        target = H.masks[int(rng.integers(len(H)))]
        adv = (RandomReplayAdversary(H, target, 0.5, rng) if rng.random() < 0.5
               else MistakeSeekingAdversary(H, target, rng))
        tr = run_game(learner_cls(H), adv, H, 30, commit="adversary")
        assert tr.valid
        assert target in tr.state.version_space
        assert tr.mistakes == score(tr.rounds, target)
        for r in tr.rounds:
            if r.source:
                assert (tr.rounds[r.source - 1].hypothesis >> r.x) & 1 == r.y
        # version space shrinks monotonically: replay the states
        s = ReliableState.initial(H)
        for r in tr.rounds:
            nxt = update_reliable_state(s, r)
            assert set(nxt.version_space) <= set(s.version_space)
            s = nxt

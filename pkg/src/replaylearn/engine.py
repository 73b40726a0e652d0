"""The replay game: round loop, reliable version space, traps and scoring.

Hypotheses inside the engine are integer masks over the class domain.
Label sources are encoded as integers: ``TRUTH`` (0) for a label drawn from
the target, ``i >= 1`` for a replay of the learner's hypothesis from round
``i`` (rounds are numbered from 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Protocol

import numpy as np

from .hypotheses import Domain, Hypothesis, HypothesisClass

TRUTH = 0


class Learner(Protocol):
    def step(self, observation: tuple[int, int] | None) -> Hypothesis:
        """Consume the previous round's (x, y), if any, and emit the next hypothesis."""


class Adversary(Protocol):
    def emit(self, view: "GameView") -> tuple[int, int, int]:
        """Return (x, y, source) for round ``view.t``."""

    def commit(self, view: "GameView") -> Hypothesis | int | None:
        """Target chosen after the last round; None defers to the worst case."""


@dataclass(frozen=True)
class RoundRecord:
    t: int
    hypothesis: int
    x: int
    y: int
    source: int = TRUTH

    @property
    def prediction(self) -> int:
        return (self.hypothesis >> self.x) & 1

    def to_json(self, n: int) -> dict:
        return {
            "t": self.t,
            "hypothesis": Hypothesis(Domain(n), self.hypothesis).to_bitstring(),
            "x": self.x,
            "y": self.y,
            "source": "truth" if self.source == TRUTH else {"replay": self.source},
        }


def _splits(any_mask: int, all_mask: int) -> int:
    return any_mask & ~all_mask


@dataclass(frozen=True)
class ReliableState:
    """Reliable index set I_t, version space VS*_t and past hypotheses H_t.

    ``past_any``/``past_all`` are the union and intersection of H_t (the
    intersection of an empty family is the full domain); ``vs_any``/``vs_all``
    likewise for the version space.
    """

    t: int
    full: int
    reliable_indices: tuple[int, ...]
    version_space: tuple[int, ...]
    past_hypotheses: tuple[int, ...]
    past_any: int
    past_all: int
    vs_any: int
    vs_all: int

    @classmethod
    def initial(cls, H: HypothesisClass) -> "ReliableState":
        full = H.domain.full
        vs_any, vs_all = 0, full
        for m in H.masks:
            vs_any |= m
            vs_all &= m
        return cls(0, full, (), H.masks, (), 0, full, vs_any, vs_all)

    def is_reliable(self, x: int, y: int) -> bool:
        """True iff no stored past hypothesis has label ``y`` at ``x``."""
        if y:
            return not (self.past_any >> x) & 1
        return bool((self.past_all >> x) & 1)

    def with_hypothesis(self, h: int) -> "ReliableState":
        if h in self.past_hypotheses:
            return self
        return replace(
            self,
            past_hypotheses=self.past_hypotheses + (h,),
            past_any=self.past_any | h,
            past_all=self.past_all & h,
        )

    def version_space_class(self, H: HypothesisClass) -> HypothesisClass:
        return HypothesisClass.from_masks(H.n, self.version_space, allow_empty=True)


def _summarize(masks: tuple[int, ...], full: int) -> tuple[int, int]:
    any_mask, all_mask = 0, full
    for m in masks:
        any_mask |= m
        all_mask &= m
    return any_mask, all_mask


def update_reliable_state(state: ReliableState, record: RoundRecord, *, include_current: bool = False) -> ReliableState:
    """Process round ``record.t``.

    Round t is reliable iff its label disagrees with every hypothesis in
    H_{t-1}. With ``include_current`` the round's own hypothesis is also
    consulted (the alternative reading of the reliability rule).
    """
    if record.t != state.t + 1:
        raise ValueError(f"expected round {state.t + 1}, got {record.t}")
    before = state.with_hypothesis(record.hypothesis) if include_current else state
    reliable = before.is_reliable(record.x, record.y)
    after = state.with_hypothesis(record.hypothesis)
    if not reliable:
        return replace(after, t=record.t)
    x, y = record.x, record.y
    vs = tuple(m for m in state.version_space if (m >> x) & 1 == y)
    vs_any, vs_all = _summarize(vs, state.full)
    return replace(
        after,
        t=record.t,
        reliable_indices=state.reliable_indices + (record.t,),
        version_space=vs,
        vs_any=vs_any,
        vs_all=vs_all,
    )


def trap_region(state: ReliableState) -> int:
    """Points where both the version space and the past hypotheses split.

    For the state after round t this is the set an adversary can exploit
    from round t+1 on (replays may cite any of H_t). The per-round trap
    with H_{t-1} is recorded by :func:`run_game` in ``GameTranscript.traps``.
    """
    return _splits(state.vs_any, state.vs_all) & _splits(state.past_any, state.past_all)


def trap_witness(state: ReliableState, x: int) -> tuple[int, int, int, int]:
    """(f0, f1, h0, h1): version-space members and past hypotheses with labels 0/1 at x."""
    bit = 1 << x
    f0 = next(m for m in state.version_space if not m & bit)
    f1 = next(m for m in state.version_space if m & bit)
    h0 = next(m for m in state.past_hypotheses if not m & bit)
    h1 = next(m for m in state.past_hypotheses if m & bit)
    return f0, f1, h0, h1


@dataclass
class GameView:
    """Everything an adaptive adversary may look at in round ``t``.

    ``hypotheses`` holds ĥ_1..ĥ_t (the current round's hypothesis is already
    emitted); ``state`` is the reliable state after round t-1.
    """

    H: HypothesisClass
    T: int
    t: int = 0
    hypotheses: list[int] = field(default_factory=list)
    xs: list[int] = field(default_factory=list)
    ys: list[int] = field(default_factory=list)
    sources: list[int] = field(default_factory=list)
    state: ReliableState | None = None
    first_seen: dict[int, int] = field(default_factory=dict)

    @property
    def current(self) -> int:
        return self.hypotheses[-1]

    def replay_source(self, x: int, y: int, prefer: int | None = None) -> int | None:
        """A round i < t whose hypothesis has label y at x (prefer ``prefer``)."""
        t = self.t
        if prefer is not None and 1 <= prefer < t and (self.hypotheses[prefer - 1] >> x) & 1 == y:
            return prefer
        for h, i in self.first_seen.items():
            if i < t and (h >> x) & 1 == y:
                return i
        return None


@dataclass
class GameTranscript:
    H: HypothesisClass
    rounds: list[RoundRecord]
    state: ReliableState
    traps: list[int]
    target: int | None = None
    mistakes: int | None = None
    valid: bool = True
    violation: str | None = None

    @property
    def T(self) -> int:
        return len(self.rounds)

    def false_positive_mistakes(self) -> int:
        """True-label mistakes with y = 0 and prediction 1."""
        if self.target is None:
            return 0
        return sum(
            1 for r in self.rounds
            if r.y == 0 and r.prediction == 1 and (self.target >> r.x) & 1 == 0
        )

    def to_json(self) -> dict:
        n = self.H.n
        return {
            "class": self.H.name,
            "domain_size": n,
            "rounds": [r.to_json(n) for r in self.rounds],
            "reliable_indices": list(self.state.reliable_indices),
            "target": None if self.target is None else Hypothesis(self.H.domain, self.target).to_bitstring(),
            "mistakes": self.mistakes,
            "valid": self.valid,
            "violation": self.violation,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))


def score(rounds: list[RoundRecord], target: int | Hypothesis) -> int:
    """Rounds where the label is wrong for the learner and true for the target."""
    if isinstance(target, Hypothesis):
        target = target.mask
    return sum(
        1 for r in rounds
        if r.y != r.prediction and (target >> r.x) & 1 == r.y
    )


def worst_case_score(rounds: list[RoundRecord], candidates: tuple[int, ...] | list[int]) -> tuple[int, int]:
    """(max score, first maximizing target) over the candidate targets."""
    if not candidates:
        raise ValueError("no consistent target")
    counts: dict[int, list[int]] = {}
    for r in rounds:
        if r.y != r.prediction:
            counts.setdefault(r.x, [0, 0])[r.y] += 1
    best, best_f = -1, candidates[0]
    for f in candidates:
        s = sum(c[(f >> x) & 1] for x, c in counts.items())
        if s > best:
            best, best_f = s, f
    return best, best_f


def _check_move(view: GameView, x: int, y: int, source: int) -> str | None:
    n = view.H.n
    if not isinstance(x, (int, np.integer)) or not 0 <= x < n:
        return f"round {view.t}: point {x} outside domain"
    if y not in (0, 1):
        return f"round {view.t}: label {y} is not a bit"
    if source != TRUTH:
        if not 1 <= source < view.t:
            return f"round {view.t}: replay source {source} is not an earlier round"
        if (view.hypotheses[source - 1] >> x) & 1 != y:
            return f"round {view.t}: replay of round {source} disagrees with label {y} at x={x}"
    return None


def run_game(
    learner: Learner,
    adversary: Adversary,
    H: HypothesisClass,
    T: int,
    *,
    commit: str = "worst_case",
    target: Hypothesis | int | None = None,
    include_current: bool = False,
) -> GameTranscript:
    """Play T rounds of the replay game and score the transcript.

    ``commit="worst_case"`` picks the consistent target maximizing the
    mistake count; ``commit="adversary"`` asks the adversary (falling back
    to the worst case when it returns None). An explicit ``target`` overrides
    both and must be consistent with the reliable rounds.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if commit not in ("worst_case", "adversary"):
        raise ValueError(f"unknown commit mode {commit!r}")
    state = ReliableState.initial(H)
    view = GameView(H, T, state=state)
    rounds: list[RoundRecord] = []
    traps: list[int] = []
    observation = None
    violation = None
    for t in range(1, T + 1):
        h = learner.step(observation)
        mask = h.mask if isinstance(h, Hypothesis) else int(h)
        view.t = t
        view.hypotheses.append(mask)
        view.first_seen.setdefault(mask, t)
        view.state = state
        x, y, source = adversary.emit(view)
        x, y, source = int(x), int(y), int(source)
        violation = _check_move(view, x, y, source)
        if violation:
            break
        record = RoundRecord(t, mask, x, y, source)
        past_split = _splits(state.past_any, state.past_all)
        state = update_reliable_state(state, record, include_current=include_current)
        traps.append(_splits(state.vs_any, state.vs_all) & past_split)
        rounds.append(record)
        view.xs.append(x)
        view.ys.append(y)
        view.sources.append(source)
        observation = (x, y)
    view.state = state
    transcript = GameTranscript(H, rounds, state, traps)
    if violation:
        transcript.valid = False
        transcript.violation = violation
        return transcript
    if not state.version_space:
        transcript.valid = False
        transcript.violation = "no hypothesis is consistent with the reliable rounds"
        return transcript
    chosen = target
    if chosen is None and commit == "adversary":
        chosen = adversary.commit(view)
    if chosen is None:
        transcript.mistakes, transcript.target = worst_case_score(rounds, state.version_space)
        return transcript
    chosen = chosen.mask if isinstance(chosen, Hypothesis) else int(chosen)
    if chosen not in state.version_space:
        transcript.valid = False
        transcript.violation = "committed target is not in the reliable version space"
        return transcript
    transcript.target = chosen
    transcript.mistakes = score(rounds, chosen)
    return transcript

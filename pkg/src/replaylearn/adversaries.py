"""Nature strategies: truthful oracles, adaptive constructions, trap exploitation.

Adversaries implement ``emit(view) -> (x, y, source)`` and
``commit(view) -> target mask | None`` (see :mod:`replaylearn.engine`).
Stochastic ones own a ``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .dimensions import closure_depth_masks
from .engine import TRUTH, GameView, _splits
from .hypotheses import Hypothesis, HypothesisClass, iter_bits


# -- distributions -------------------------------------------------------------

def _geometric_weights(k: int) -> list[Fraction]:
    """Weights for positions 1..k: position j >= 2 gets 1/2 * 3^(1-j), position 1 the rest."""
    tail = [Fraction(1, 2 * 3 ** (j - 1)) for j in range(2, k + 1)]
    return [1 - sum(tail, Fraction(0))] + tail


CONVEX_BODIES = {"interval": 1, "disk": 2, "polygon": 2, "ball": 3}


def _in_hexagon(p: np.ndarray) -> np.ndarray:
    # regular hexagon with unit circumradius: |<p, n_i>| <= cos(pi/6) for three normals
    normals = np.array([[np.cos(a), np.sin(a)] for a in np.pi / 6 + np.arange(3) * np.pi / 3])
    return (np.abs(p @ normals.T) <= np.cos(np.pi / 6)).all(axis=1)


@dataclass(frozen=True)
class DistributionSpec:
    """A sampling distribution over domain points or over a convex body.

    For finite kinds ``points`` lists the support and ``exact`` the exact
    probabilities (Fractions); ``probabilities`` is the float view.
    """

    kind: str
    points: tuple[int, ...] = ()
    exact: tuple[Fraction, ...] = ()
    body: str | None = None
    d: int = 0

    @classmethod
    def uniform(cls, points) -> "DistributionSpec":
        points = tuple(int(p) for p in points)
        if not points:
            raise ValueError("empty support")
        return cls("uniform", points, tuple(Fraction(1, len(points)) for _ in points))

    @classmethod
    def geometric_threshold(cls, n: int) -> "DistributionSpec":
        """P(point k) = 1/2 * 3^(k-N) for 1-based k < N, the rest on N (0-based here)."""
        weights = _geometric_weights(n)
        # position j of the witness order is point N - j (0-based)
        return cls("geometric_threshold", tuple(range(n - 1, -1, -1)), tuple(weights))

    @classmethod
    def geometric_witness(cls, points) -> "DistributionSpec":
        points = tuple(int(p) for p in points)
        if not points:
            raise ValueError("empty witness")
        return cls("geometric_witness", points, tuple(_geometric_weights(len(points))))

    @classmethod
    def uniform_convex(cls, body: str, d: int | None = None) -> "DistributionSpec":
        if body not in CONVEX_BODIES:
            raise ValueError(f"unsupported body {body!r}; known: {', '.join(CONVEX_BODIES)}")
        dim = CONVEX_BODIES[body]
        if d is not None and d != dim:
            raise ValueError(f"body {body!r} lives in dimension {dim}, not {d}")
        return cls("uniform_convex", body=body, d=dim)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([float(w) for w in self.exact])

    def probability(self, x: int) -> Fraction:
        return sum((w for p, w in zip(self.points, self.exact) if p == x), Fraction(0))

    @cached_property
    def _cdf(self) -> np.ndarray:
        cdf = np.cumsum(self.probabilities)
        return cdf / cdf[-1]

    def sample(self, rng: np.random.Generator, size: int | None = None):
        if self.kind == "uniform_convex":
            return self._sample_body(rng, 1 if size is None else size)[0 if size is None else slice(None)]
        if self.kind == "uniform":
            idx = rng.integers(len(self.points), size=size)
        else:
            idx = np.searchsorted(self._cdf, rng.random(size), side="right")
            idx = np.minimum(idx, len(self.points) - 1)
        if size is None:
            return self.points[int(idx)]
        return np.asarray(self.points)[idx]

    def _sample_body(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.body == "interval":
            return rng.random((size, 1))
        out = np.empty((0, self.d))
        while len(out) < size:
            cand = rng.uniform(-1.0, 1.0, size=(2 * size, self.d))
            if self.body == "polygon":
                keep = _in_hexagon(cand)
            else:
                keep = (cand ** 2).sum(axis=1) <= 1.0
            out = np.vstack([out, cand[keep]])
        return out[:size]


# -- helpers -------------------------------------------------------------------

@lru_cache(maxsize=32)
def witness_plan(masks: tuple[int, ...], n: int, first: int, prefer_outside: bool = False):
    """Depth, witness points and top support of closure(H^f) for f = ``first``.

    Cached: stochastic experiments replan the same class in every trial.
    """
    gen = tuple(m ^ first for m in masks)
    depth, _, points, top = closure_depth_masks(gen, n, prefer_outside=frozenset(gen) if prefer_outside else None)
    return depth, points, top


def _mask(h) -> int:
    return h.mask if isinstance(h, Hypothesis) else int(h)


def current_trap(view: GameView) -> int:
    """Points exploitable this round: VS* splits and some past or current hypothesis disagrees."""
    state = view.state.with_hypothesis(view.current)
    return _splits(state.vs_any, state.vs_all) & _splits(state.past_any, state.past_all)


def exploit_move(view: GameView, x: int) -> tuple[int, int, int]:
    """Label x opposite to the current prediction, citing an earlier hypothesis."""
    y = 1 - ((view.current >> x) & 1)
    source = view.replay_source(x, y)
    if source is None:
        raise RuntimeError(f"round {view.t}: no earlier hypothesis labels {x} with {y}")
    return x, y, source


class _TrapMixin:
    """Shared trap detection: once a trap point is found it is played forever."""

    trap_point: int | None = None
    trap_round: int | None = None

    def _check_trap(self, view: GameView, prefer=()) -> bool:
        if self.trap_point is not None:
            return True
        region = current_trap(view)
        if not region:
            return False
        for x in prefer:
            if (region >> x) & 1:
                self.trap_point = x
                break
        else:
            self.trap_point = next(iter_bits(region))
        self.trap_round = view.t
        return True


# -- truthful ------------------------------------------------------------------

class TruthAdversary:
    """Always reveals the target's label; points from a sequence or a distribution."""

    def __init__(self, target, points=None, distribution: DistributionSpec | None = None,
                 rng: np.random.Generator | None = None):
        self.target = _mask(target)
        if (points is None) == (distribution is None):
            raise ValueError("give exactly one of points or distribution")
        self.points = None if points is None else [int(p) for p in points]
        self.distribution = distribution
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def emit(self, view: GameView):
        if self.points is not None:
            if view.t > len(self.points):
                raise IndexError(f"point sequence exhausted at round {view.t}")
            x = self.points[view.t - 1]
        else:
            x = self.distribution.sample(self.rng)
        return x, (self.target >> x) & 1, TRUTH

    def commit(self, view: GameView):
        return self.target


class ScriptedAdversary:
    """Replays a fixed list of (x, y, source) moves."""

    def __init__(self, moves, target=None):
        self.moves = list(moves)
        self.target = None if target is None else _mask(target)

    def emit(self, view: GameView):
        if view.t > len(self.moves):
            raise IndexError(f"script exhausted at round {view.t}")
        return self.moves[view.t - 1]

    def commit(self, view: GameView):
        return self.target


# -- adaptive lower-bound constructions ---------------------------------------------

class DescendingAdversary:
    """Thresholds lower bound: walk down the region where the learner starts wrong.

    With first hypothesis P, if the complement of P is at least as large as P
    its points are played from the top down with label 1 (target: all ones);
    otherwise the points of P are played from the bottom up with label 0
    (target: all zeros). Once the walk is done the last move is repeated.
    """

    def __init__(self, n: int):
        self.n = n
        self.full = (1 << n) - 1
        self.schedule: list[int] | None = None
        self.label = 1

    def _plan(self, first: int) -> None:
        outside = [x for x in range(self.n) if not (first >> x) & 1]
        inside = [x for x in range(self.n) if (first >> x) & 1]
        if len(outside) >= len(inside):
            self.schedule, self.label = outside[::-1], 1
        else:
            self.schedule, self.label = inside, 0

    def emit(self, view: GameView):
        if self.schedule is None:
            self._plan(view.hypotheses[0])
        i = min(view.t, len(self.schedule)) - 1
        return self.schedule[i], self.label, TRUTH

    def commit(self, view: GameView):
        return self.full if self.label else 0


class WitnessChainAdversary(_TrapMixin):
    """Play the witness points of closure(H^f), f the learner's first hypothesis.

    Every witness point gets label 1 in the f-representation. Before each
    move the adversary checks for a trap; once one exists it switches to
    playing the trap point against the learner for the rest of the game.
    """

    def __init__(self, H: HypothesisClass):
        self.H = H
        self.f: int | None = None
        self.points: tuple[int, ...] = ()
        self.top_support = 0
        self.depth = 0

    def _plan(self, first: int) -> None:
        self.f = first
        self.depth, self.points, self.top_support = witness_plan(self.H.masks, self.H.n, first, True)

    def emit(self, view: GameView):
        if self.f is None:
            self._plan(view.hypotheses[0])
        upcoming = self.points[view.t - 1:]
        if self._check_trap(view, prefer=upcoming):
            return exploit_move(view, self.trap_point)
        if view.t <= len(self.points):
            x = self.points[view.t - 1]
            return x, 1 ^ ((self.f >> x) & 1), TRUTH
        # chain exhausted: keep labels consistent with the planned target
        x = self.points[-1] if self.points else 0
        return x, (self._target() >> x) & 1, TRUTH

    def _target(self) -> int:
        i = (self.top_support & -self.top_support).bit_length() - 1
        return self.H.masks[i]

    def commit(self, view: GameView):
        if self.trap_point is not None or not self.top_support:
            return None
        return self._target()


class TrapExploitAdversary(_TrapMixin):
    """Follow ``base`` (and an optional scripted prefix) until a trap opens, then exploit it.

    With a ``distribution`` the exploitation is stochastic: sampled points
    other than the trap point get the label of the first hypothesis.
    """

    def __init__(self, base=None, prefix=(), distribution: DistributionSpec | None = None,
                 rng: np.random.Generator | None = None):
        self.base = base
        self.prefix = list(prefix)
        self.distribution = distribution
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def emit(self, view: GameView):
        if view.t <= len(self.prefix):
            return self.prefix[view.t - 1]
        if self._check_trap(view):
            if self.distribution is None:
                return exploit_move(view, self.trap_point)
            x = self.distribution.sample(self.rng)
            if x == self.trap_point:
                return exploit_move(view, x)
            return x, (view.hypotheses[0] >> x) & 1, 1
        if self.base is None:
            raise RuntimeError(f"round {view.t}: no trap to exploit and no base strategy")
        return self.base.emit(view)

    def commit(self, view: GameView):
        if self.trap_point is None and self.base is not None:
            return self.base.commit(view)
        return None


class GeometricStochasticAdversary(_TrapMixin):
    """Sample witness points of closure(H^f) geometrically and label them 1 in f.

    f is the learner's first hypothesis. On thresholds with an all-zero first
    hypothesis the witness points are N, N-1, ..., 1 (1-based) and the
    distribution is the geometric threshold one. A detected trap is exploited
    with the stochastic rule of :class:`TrapExploitAdversary`.
    """

    def __init__(self, H: HypothesisClass, rng: np.random.Generator | None = None, exploit_traps: bool = True):
        self.H = H
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.exploit_traps = exploit_traps
        self.f: int | None = None
        self.distribution: DistributionSpec | None = None
        self.top_support = 0

    def _plan(self, first: int) -> None:
        self.f = first
        _, points, self.top_support = witness_plan(self.H.masks, self.H.n, first)
        self.points = points
        self.distribution = DistributionSpec.geometric_witness(points) if points else None

    def emit(self, view: GameView):
        if self.f is None:
            self._plan(view.hypotheses[0])
        if self.distribution is None:
            return 0, (self.H.masks[0] & 1), TRUTH
        x = self.distribution.sample(self.rng)
        if self.exploit_traps and self._check_trap(view):
            if x == self.trap_point:
                return exploit_move(view, x)
            return x, (view.hypotheses[0] >> x) & 1, 1
        return x, 1 ^ ((self.f >> x) & 1), TRUTH

    def commit(self, view: GameView):
        if self.trap_point is not None or not self.top_support:
            return None
        i = (self.top_support & -self.top_support).bit_length() - 1
        return self.H.masks[i]


# -- fuzzing -------------------------------------------------------------------

class RandomReplayAdversary:
    """Uniform points; with probability p the label is a replay of a random earlier round."""

    def __init__(self, H: HypothesisClass, target, p: float = 0.5, rng: np.random.Generator | None = None):
        self.H = H
        self.target = _mask(target)
        self.p = p
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def emit(self, view: GameView):
        x = int(self.rng.integers(self.H.n))
        if view.t > 1 and self.rng.random() < self.p:
            i = int(self.rng.integers(1, view.t))
            return x, (view.hypotheses[i - 1] >> x) & 1, i
        return x, (self.target >> x) & 1, TRUTH

    def commit(self, view: GameView):
        return self.target


class MistakeSeekingAdversary:
    """Prefer points where the learner is wrong now, truthfully or through a replay."""

    def __init__(self, H: HypothesisClass, target, rng: np.random.Generator | None = None):
        self.H = H
        self.target = _mask(target)
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def emit(self, view: GameView):
        h = view.current
        wrong = list(iter_bits((h ^ self.target) & view.state.full))
        if wrong and self.rng.random() < 0.5:
            x = wrong[int(self.rng.integers(len(wrong)))]
            return x, (self.target >> x) & 1, TRUTH
        state = view.state
        replayable = list(iter_bits((state.past_any & ~h) | (~state.past_all & h & state.full)))
        if replayable:
            x = replayable[int(self.rng.integers(len(replayable)))]
            y = 1 - ((h >> x) & 1)
            return x, y, view.replay_source(x, y)
        x = int(self.rng.integers(self.H.n))
        return x, (self.target >> x) & 1, TRUTH

    def commit(self, view: GameView):
        return self.target


class ReplayFirstAdversary:
    """Truth in round 1, then the first hypothesis's labels where it disagrees with the target."""

    def __init__(self, H: HypothesisClass, target, rng: np.random.Generator | None = None):
        self.H = H
        self.target = _mask(target)
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def emit(self, view: GameView):
        if view.t == 1:
            x = int(self.rng.integers(self.H.n))
            return x, (self.target >> x) & 1, TRUTH
        first = view.hypotheses[0]
        diff = list(iter_bits((first ^ self.target) & view.state.full))
        x = diff[int(self.rng.integers(len(diff)))] if diff else int(self.rng.integers(self.H.n))
        return x, (first >> x) & 1, 1

    def commit(self, view: GameView):
        return self.target


# -- convex --------------------------------------------------------------------

class ConvexUniformAdversary:
    """i.i.d. uniform points from a convex body, all labelled 1 (the body is the target)."""

    def __init__(self, body: str, rng: np.random.Generator | None = None):
        self.distribution = DistributionSpec.uniform_convex(body)
        self.d = self.distribution.d
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def sample(self, size: int) -> np.ndarray:
        return self.distribution.sample(self.rng, size)


def run_convex_game(learner, adversary: ConvexUniformAdversary, T: int) -> int:
    """Round-by-round game for a convex learner; every label is a truthful 1."""
    mistakes = 0
    observation = None
    for x in adversary.sample(T):
        predictor = learner.step(observation)
        if predictor(x) != 1:
            mistakes += 1
        observation = (x, 1)
    return mistakes


def convex_mistake_times(learner, points: np.ndarray, chunk: int = 512) -> list[int]:
    """0-based rounds where ``learner`` errs on the all-positive stream ``points``.

    Equivalent to :func:`run_convex_game` but checks membership for a block of
    upcoming points at once and only advances the learner on a mistake.
    """
    times: list[int] = []
    i, T = 0, len(points)
    size = 8
    predictor = learner.step(None)
    while i < T:
        if predictor.d >= 2 and predictor.equations is None:
            block = points[i:i + 1]
        else:
            block = points[i:i + size]
        outside = np.flatnonzero(~predictor.contains(block))
        if not len(outside):
            i += len(block)
            size = min(2 * size, chunk)
            continue
        size = max(8, int(outside[0]) * 2)
        j = i + int(outside[0])
        times.append(j)
        predictor = learner.step((points[j], 1))
        i = j + 1
    return times


ADVERSARIES = (
    "truth", "descending", "witness_chain", "trap_exploit", "geometric_stochastic",
    "uniform_stochastic", "convex_uniform", "random_replay", "mistake_seeking", "replay_first",
)


def make_adversary(name: str, H: HypothesisClass | None = None, *, target=None,
                   rng: np.random.Generator | None = None, **kwargs):
    """Build an adversary by registry name.

    Targets default to the first hypothesis of H for the truthful and fuzz
    strategies (all ones for ``uniform_stochastic``).
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    if target is None and H is not None:
        target = H.domain.full if name == "uniform_stochastic" else H.masks[0]
    if name == "truth":
        points = kwargs.get("points")
        dist = None if points is not None else DistributionSpec.uniform(range(H.n))
        return TruthAdversary(target, points=points, distribution=dist, rng=rng)
    if name == "uniform_stochastic":
        return TruthAdversary(target, distribution=DistributionSpec.uniform(range(H.n)), rng=rng)
    if name == "descending":
        return DescendingAdversary(H.n)
    if name == "witness_chain":
        return WitnessChainAdversary(H)
    if name == "trap_exploit":
        return TrapExploitAdversary(base=RandomReplayAdversary(H, target, kwargs.get("p", 0.5), rng))
    if name == "geometric_stochastic":
        return GeometricStochasticAdversary(H, rng)
    if name == "convex_uniform":
        return ConvexUniformAdversary(kwargs.get("body", "disk"), rng)
    if name == "random_replay":
        return RandomReplayAdversary(H, target, kwargs.get("p", 0.5), rng)
    if name == "mistake_seeking":
        return MistakeSeekingAdversary(H, target, rng)
    if name == "replay_first":
        return ReplayFirstAdversary(H, target, rng)
    raise ValueError(f"unknown adversary {name!r}; known: {', '.join(ADVERSARIES)}")

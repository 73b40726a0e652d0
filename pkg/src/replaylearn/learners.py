"""Learner strategies for the replay game.

Every learner exposes ``step(observation)``: it consumes the previous
round's ``(x, y)`` (None in round 1) and returns the hypothesis for the next
round. Nothing else flows from the game to the learner.
"""

from __future__ import annotations


import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .dimensions import _point_supports, extended_threshold_dimension, find_vcd1_representation
from .hypotheses import Hypothesis, HypothesisClass, Representation, popcount

HULL_EPS = 1e-9


class ClosureLearner:
    """Closure algorithm on the f-representation of H.

    Internally the learner keeps a closed set of the intersection closure of
    H^f, starting at its bottom element, and moves to the closure of
    ``current + {x}`` on every (flipped) false negative. The emitted
    hypothesis is the internal one flipped back by f.
    """

    def __init__(self, H: HypothesisClass, representation: Representation | int | None = None):
        self.H = H
        if isinstance(representation, Representation):
            representation = representation.mask
        self.f = representation or 0
        self.generators = [m ^ self.f for m in H.masks]
        self._supports = _point_supports(self.generators, H.n)
        self._full = H.domain.full
        self.support = (1 << len(self.generators)) - 1
        self.internal = self._closed(self.support)
        self.updates = 0
        self._emitted = Hypothesis(H.domain, self.internal ^ self.f)

    def _closed(self, support: int) -> int:
        out = 0
        for x, sx in enumerate(self._supports):
            if not support & ~sx:
                out |= 1 << x
        return out

    def step(self, observation: tuple[int, int] | None = None) -> Hypothesis:
        if observation is not None:
            x, y = observation
            if (self.f >> x) & 1:
                y = 1 - y
            if y == 1 and not (self.internal >> x) & 1:
                self.support &= self._supports[x]
                # no generator contains the new point set: empty intersection
                self.internal = self._closed(self.support) if self.support else self._full
                self.updates += 1
                self._emitted = Hypothesis(self.H.domain, self.internal ^ self.f)
        return self._emitted


def closure_extdim_learner(H: HypothesisClass) -> ClosureLearner:
    return ClosureLearner(H, extended_threshold_dimension(H).representation)


def closure_vcd1_learner(H: HypothesisClass) -> ClosureLearner:
    rep = find_vcd1_representation(H)
    if rep is None:
        raise ValueError(f"{H!r} does not have VC dimension 1")
    return ClosureLearner(H, rep)


class ConservativeThresholdLearner:
    """Start at the all-zero hypothesis; on a false negative at x move to {>= x}."""

    def __init__(self, n: int):
        from .hypotheses import Domain

        self.domain = Domain(n)
        self.mask = 0
        self._emitted = Hypothesis(self.domain, 0)

    def step(self, observation: tuple[int, int] | None = None) -> Hypothesis:
        if observation is not None:
            x, y = observation
            if y == 1 and not (self.mask >> x) & 1:
                self.mask = self.domain.full ^ ((1 << x) - 1)
                self._emitted = Hypothesis(self.domain, self.mask)
        return self._emitted


class HalvingLearner:
    """Majority vote over every hypothesis consistent with all observed labels.

    Replayed labels are trusted like any other label. Ties predict 1; once
    the version space is empty the learner predicts 0 everywhere.
    """

    def __init__(self, H: HypothesisClass):
        self.H = H
        self._supports = _point_supports(H.masks, H.n)
        self.alive = (1 << len(H)) - 1
        self.emptied_at: int | None = None
        self.rounds = 0
        self._emitted = self._vote()

    @property
    def version_space(self) -> list[int]:
        return [m for i, m in enumerate(self.H.masks) if (self.alive >> i) & 1]

    def _vote(self) -> Hypothesis:
        size = popcount(self.alive)
        mask = 0
        if size:
            for x, s in enumerate(self._supports):
                if 2 * popcount(self.alive & s) >= size:
                    mask |= 1 << x
        return Hypothesis(self.H.domain, mask)

    def step(self, observation: tuple[int, int] | None = None) -> Hypothesis:
        if observation is not None:
            self.rounds += 1
            x, y = observation
            keep = self._supports[x] if y else ~self._supports[x]
            alive = self.alive & keep
            if alive != self.alive:
                self.alive = alive
                if not alive and self.emptied_at is None:
                    self.emptied_at = self.rounds
                self._emitted = self._vote()
        return self._emitted


class GreedyProperLearner:
    """Proper baseline: smallest member of H consistent with its trusted labels.

    A label is trusted when it disagrees with every hypothesis the learner
    emitted before that round. Candidates are ranked by size, then class
    order. With no consistent member the first hypothesis of H is emitted.
    """

    def __init__(self, H: HypothesisClass):
        self.H = H
        self.order = sorted(range(len(H)), key=lambda i: (popcount(H.masks[i]), i))
        self.ones = 0
        self.zeros = 0
        self.past_any = 0
        self.past_all = H.domain.full
        self.inconsistent = False
        self.current = self._choose()

    def _choose(self) -> int:
        for i in self.order:
            m = self.H.masks[i]
            if m & self.ones == self.ones and not m & self.zeros:
                return m
        self.inconsistent = True
        return self.H.masks[0]

    def step(self, observation: tuple[int, int] | None = None) -> Hypothesis:
        if observation is not None:
            x, y = observation
            bit = 1 << x
            trusted = not self.past_any & bit if y else bool(self.past_all & bit)
            self.past_any |= self.current
            self.past_all &= self.current
            if trusted:
                if y:
                    self.ones |= bit
                else:
                    self.zeros |= bit
                self.current = self._choose()
        return Hypothesis(self.H.domain, self.current)


# -- convex bodies -------------------------------------------------------------

def in_hull_lp(points: np.ndarray, x: np.ndarray, eps: float = HULL_EPS) -> bool:
    """Is x a convex combination of the rows of ``points``, up to an L1 residual eps?"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.asarray(x, dtype=float)
    m, d = points.shape
    # variables: weights (m), positive slack (d), negative slack (d)
    cost = np.concatenate([np.zeros(m), np.ones(2 * d)])
    a_eq = np.zeros((d + 1, m + 2 * d))
    a_eq[:d, :m] = points.T
    a_eq[:d, m:m + d] = np.eye(d)
    a_eq[:d, m + d:] = -np.eye(d)
    a_eq[d, :m] = 1.0
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return bool(res.status == 0 and res.fun <= eps)


def full_dimensional(points: np.ndarray, d: int) -> bool:
    """Do the points affinely span R^d (d >= 2)? Qhull needs this."""
    if d < 2 or len(points) <= d:
        return False
    return bool(np.linalg.matrix_rank(points[1:] - points[0]) == d)


class HullPredictor:
    """Snapshot of the convex hull of stored points, used as a 0/1 predictor."""

    def __init__(self, points: np.ndarray, d: int, eps: float = HULL_EPS, equations: np.ndarray | None = None):
        self.points = points
        self.d = d
        self.eps = eps
        self.equations = equations
        if equations is None and full_dimensional(points, d):
            self.equations = ConvexHull(points).equations

    def __call__(self, x) -> int:
        x = np.asarray(x, dtype=float).reshape(self.d)
        if not len(self.points):
            return 0
        if self.d == 1:
            return int(self.points.min() - self.eps <= x[0] <= self.points.max() + self.eps)
        if self.equations is not None:
            return int((self.equations[:, :-1] @ x + self.equations[:, -1]).max() <= self.eps)
        return int(in_hull_lp(self.points, x, self.eps))

    def contains(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float).reshape(-1, self.d)
        if not len(self.points):
            return np.zeros(len(xs), dtype=bool)
        if self.d == 1:
            return (xs[:, 0] >= self.points.min() - self.eps) & (xs[:, 0] <= self.points.max() + self.eps)
        if self.equations is not None:
            return (xs @ self.equations[:, :-1].T + self.equations[:, -1]).max(axis=1) <= self.eps
        return np.array([in_hull_lp(self.points, x, self.eps) for x in xs], dtype=bool)


class ConvexHullLearner:
    """Closure algorithm for convex sets: predict 1 inside the hull of stored positives."""

    def __init__(self, d: int, eps: float = HULL_EPS):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = d
        self.eps = eps
        self.points = np.empty((0, d))
        self.predictor = HullPredictor(self.points, d, eps)

    def step(self, observation=None) -> HullPredictor:
        if observation is not None:
            x, y = observation
            x = np.asarray(x, dtype=float).reshape(self.d)
            if not np.all(np.isfinite(x)):
                raise ValueError(f"non-finite point {x}")
            if y == 1 and not self.predictor(x):
                self._add(x)
        return self.predictor

    def _add(self, x: np.ndarray) -> None:
        points = np.vstack([self.points, x])
        equations = None
        if self.d == 1:
            points = np.array([[points.min()], [points.max()]]) if len(points) > 1 else points
        elif self.predictor.equations is not None or full_dimensional(points, self.d):
            hull = ConvexHull(points)
            # only hull vertices matter for later membership tests
            points, equations = points[hull.vertices], hull.equations
        self.points = points
        self.predictor = HullPredictor(points, self.d, self.eps, equations)


LEARNERS = {
    "closure": lambda H, **kw: ClosureLearner(H, kw.get("representation")),
    "closure_extdim": lambda H, **kw: closure_extdim_learner(H),
    "closure_vcd1": lambda H, **kw: closure_vcd1_learner(H),
    "conservative_threshold": lambda H, **kw: ConservativeThresholdLearner(H.n),
    "halving": lambda H, **kw: HalvingLearner(H),
    "greedy_proper": lambda H, **kw: GreedyProperLearner(H),
    "convex_hull": lambda H=None, **kw: ConvexHullLearner(kw.get("d", 2)),
}


def make_learner(name: str, H: HypothesisClass | None = None, **kwargs):
    try:
        factory = LEARNERS[name]
    except KeyError:
        raise ValueError(f"unknown learner {name!r}; known: {', '.join(LEARNERS)}") from None
    return factory(H, **kwargs)

"""Exact VC, Littlestone, Threshold, depth and Extended Threshold dimensions.

All calculators are exhaustive and meant for desk-scale classes. Threshold
and Extended Threshold values come with certificates that are re-verified
before they are returned.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import lru_cache

from .hypotheses import (
    ClosureFamily,
    Hypothesis,
    HypothesisClass,
    Representation,
    apply_representation,
    all_subsets,
    check_cap,
    intersection_closure,
    is_intersection_closed,
    popcount,
)

EXTDIM_CAP = 16

sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))


class CertificateError(AssertionError):
    """A search returned a certificate that does not verify."""


@dataclass(frozen=True)
class WitnessSet:
    """Points x_1..x_k and hypotheses h_0..h_k with h_i(x_j) = [j <= i]."""

    points: tuple[int, ...]
    hypotheses: tuple[Hypothesis, ...]

    @property
    def size(self) -> int:
        return len(self.points)

    def verify(self, H: HypothesisClass | ClosureFamily | None = None) -> bool:
        k = len(self.points)
        if len(self.hypotheses) != k + 1 or len(set(self.points)) != k:
            return False
        if H is not None and any(h not in H for h in self.hypotheses):
            return False
        return all(
            h(x) == (1 if j <= i else 0)
            for i, h in enumerate(self.hypotheses)
            for j, x in enumerate(self.points, start=1)
        )

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "hypotheses": [h.to_bitstring() for h in self.hypotheses],
        }


def _point_supports(masks: tuple[int, ...] | list[int], n: int) -> list[int]:
    """For each point x, the bitmask over hypothesis indices with h(x) = 1."""
    out = [0] * n
    for i, m in enumerate(masks):
        bit = 1 << i
        x = 0
        while m:
            if m & 1:
                out[x] |= bit
            m >>= 1
            x += 1
    return out


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


# -- VC dimension ------------------------------------------------------------

def shatters(H: HypothesisClass, points: int) -> bool:
    patterns = {m & points for m in H.masks}
    return len(patterns) == 1 << popcount(points)


def vc_dimension(H: HypothesisClass) -> int:
    """Size of the largest shattered set.

    Shattering is hereditary, so the search stops at the first size with no
    shattered set.
    """
    check_cap(H.n)
    best = 0
    for k in range(1, H.n + 1):
        if 1 << k > len(H):
            break
        if not any(shatters(H, s) for s in all_subsets(range(H.n), k)):
            break
        best = k
    return best


# -- Littlestone dimension ---------------------------------------------------

def _ldim_recursive(supports: list[int], n: int, memo: dict | None):
    def ldim(v: int) -> int:
        if v & (v - 1) == 0:
            return 0
        if memo is not None and v in memo:
            return memo[v]
        ceiling = popcount(v).bit_length() - 1
        best = 0
        for x in range(n):
            one = v & supports[x]
            if not one or one == v:
                continue
            value = 1 + min(ldim(one), ldim(v ^ one))
            if value > best:
                best = value
                if memo is not None and best == ceiling:
                    break
        if memo is not None:
            memo[v] = best
        return best

    return ldim


def littlestone_dimension(H: HypothesisClass) -> int:
    """Depth of the deepest mistake tree, memoized on index subsets of H."""
    check_cap(H.n)
    supports = _point_supports(H.masks, H.n)
    return _ldim_recursive(supports, H.n, {})((1 << len(H)) - 1)


def littlestone_dimension_naive(H: HypothesisClass) -> int:
    """Unmemoized recursion over restrictions; independent oracle for tests."""

    def ldim(masks: list[int]) -> int:
        if len(masks) <= 1:
            return 0
        best = 0
        for x in range(H.n):
            ones = [m for m in masks if (m >> x) & 1]
            zeros = [m for m in masks if not (m >> x) & 1]
            if ones and zeros:
                best = max(best, 1 + min(ldim(ones), ldim(zeros)))
        return best

    return ldim(list(H.masks))


# -- Threshold dimension and depth -------------------------------------------

def _threshold_search(masks: tuple[int, ...], n: int) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    """DFS over ordered point sequences.

    A state holds, for each level i = 0..k, the set of hypotheses (as an
    index bitmask) matching h(x_j) = [j <= i] on the points chosen so far.
    Appending x splits the top level in two and filters the lower levels
    to hypotheses with h(x) = 0. Returns (k, points, level masks).
    """
    supports = _point_supports(masks, n)
    memo: dict[tuple[int, ...], tuple[int, ...]] = {}

    def extend(levels: tuple[int, ...]) -> tuple[int, ...]:
        top = levels[-1]
        if top & (top - 1) == 0:
            return ()
        if levels in memo:
            return memo[levels]
        best: tuple[int, ...] = ()
        ceiling = popcount(top) - 1
        for x in range(n):
            s = supports[x]
            upper = top & s
            if not upper or upper == top:
                continue
            lowered = tuple(level & ~s for level in levels)
            if not all(lowered):
                continue
            tail = extend(lowered + (upper,))
            if len(tail) + 1 > len(best):
                best = (x,) + tail
                if len(best) == ceiling:
                    break
        memo[levels] = best
        return best

    start = ((1 << len(masks)) - 1,)
    points = extend(start)
    levels = start
    for x in points:
        s = supports[x]
        levels = tuple(level & ~s for level in levels) + (levels[-1] & s,)
    return len(points), points, levels


def chain_to_witness(chain: tuple[Hypothesis, ...]) -> WitnessSet:
    """Witness from an increasing strict chain c_0 < c_1 < ... < c_L.

    x_t is the lowest point of c_t minus c_{t-1}.
    """
    points = tuple(_lowest(chain[t].mask & ~chain[t - 1].mask) for t in range(1, len(chain)))
    return WitnessSet(points, tuple(chain))


def chain_depth(F: ClosureFamily | HypothesisClass) -> tuple[int, tuple[Hypothesis, ...]]:
    """Longest strict chain, as a longest path in the containment DAG.

    The certificate is returned in increasing order c_0 < c_1 < ... < c_L.
    """
    if isinstance(F, HypothesisClass):
        elements = tuple(sorted(F.hypotheses, key=lambda h: (popcount(h.mask), h.mask)))
        F = ClosureFamily(F, elements)
    below = F.strict_subsets
    length = [0] * len(F)
    parent = [-1] * len(F)
    for i, preds in enumerate(below):
        for j in preds:
            if length[j] + 1 > length[i]:
                length[i] = length[j] + 1
                parent[i] = j
    top = max(range(len(F)), key=lambda i: (length[i], -i))
    chain = []
    i = top
    while i >= 0:
        chain.append(F.elements[i])
        i = parent[i]
    chain.reverse()
    return length[top], tuple(chain)


def closure_depth_masks(masks: tuple[int, ...] | list[int], n: int, *, prefer_outside: frozenset[int] | None = None
                        ) -> tuple[int, tuple[int, ...], tuple[int, ...], int]:
    """Depth of the intersection closure of ``masks`` without building it.

    A closed set is identified by its support, the set of generators that
    contain it. Every longest chain can be refined into single-point steps
    ``c -> clos(c + {x})`` starting from the bottom element, and the support
    of ``clos(c + {x})`` is ``support(c) & support(x)``. The longest path in
    this support DAG is the depth.

    With ``prefer_outside``, ties among longest chains are broken towards
    chains with more elements outside that set.

    Returns (depth, chain of closed sets in increasing order, witness points,
    support of the top element).
    """
    supports = _point_supports(masks, n)
    full = (1 << len(masks)) - 1
    scored = prefer_outside is not None

    def closed(s: int) -> int:
        # x lies in every generator of s iff s is inside the support of x
        out = 0
        for x, sx in enumerate(supports):
            if not s & ~sx:
                out |= 1 << x
        return out

    @lru_cache(maxsize=None)
    def best(s: int) -> tuple[int, int, int, int]:
        # (length, outside-count, -x, next support) for the best continuation
        result = (0, 0, 0, -1)
        seen = set()
        for x in range(n):
            nxt = s & supports[x]
            if not nxt or nxt == s or nxt in seen:
                continue
            seen.add(nxt)
            sub = best(nxt)
            bonus = 0
            if scored and closed(nxt) not in prefer_outside:
                bonus = 1
            cand = (sub[0] + 1, sub[1] + bonus, -x, nxt)
            if cand[:3] > result[:3]:
                result = cand
        return result

    s = full
    chain = [closed(s)]
    points = []
    while True:
        length, _, negx, nxt = best(s)
        if nxt < 0:
            break
        points.append(-negx)
        s = nxt
        chain.append(closed(s))
    best.cache_clear()
    return len(points), tuple(chain), tuple(points), s


def closure_threshold_dimension(H: HypothesisClass) -> tuple[int, WitnessSet]:
    """Threshold dimension of the intersection closure of H (= its depth)."""
    check_cap(H.n)
    k, chain, points, _ = closure_depth_masks(H.masks, H.n)
    witness = WitnessSet(points, tuple(H.hypothesis(c) for c in chain))
    _require(witness.verify(), "closure chain witness")
    return k, witness


def _require(ok: bool, what: str) -> None:
    if not ok:
        raise CertificateError(f"{what} failed verification")


def threshold_dimension(H: HypothesisClass, method: str = "auto") -> tuple[int, WitnessSet]:
    """Largest k with a witness set in H.

    ``method="chain"`` uses the longest chain, valid only for
    intersection-closed classes; ``"search"`` always runs the witness DFS;
    ``"auto"`` picks the chain route when the class is intersection-closed.
    """
    if method == "auto":
        method = "chain" if is_intersection_closed(H) else "search"
    if method == "chain":
        if not is_intersection_closed(H):
            raise ValueError("chain method requires an intersection-closed class")
        k, chain = chain_depth(H)
        witness = chain_to_witness(chain)
    elif method == "search":
        check_cap(H.n)
        k, points, levels = _threshold_search(H.masks, H.n)
        witness = WitnessSet(points, tuple(H[_lowest(level)] for level in levels))
    else:
        raise ValueError(f"unknown method {method!r}")
    _require(witness.verify(H), "threshold witness")
    return k, witness


# -- Extended Threshold dimension --------------------------------------------

@dataclass(frozen=True)
class ExtendedThreshold:
    value: int
    representation: Representation
    witness: WitnessSet

    def __iter__(self):
        return iter((self.value, self.representation, self.witness))


def extended_threshold_dimension(H: HypothesisClass, *, lower_bound: int = 0) -> ExtendedThreshold:
    """Minimum over all masks f of the depth of the closure of H^f.

    All ``2**N`` masks are scanned; ties go to the smallest mask. The scan
    stops early once ``lower_bound`` is reached.
    """
    check_cap(H.n, EXTDIM_CAP, "extended threshold dimension")
    n = H.n
    masks = H.masks
    best_value, best_f = None, 0
    for f in range(1 << n):
        k, _, _, _ = closure_depth_masks([m ^ f for m in masks], n)
        if best_value is None or k < best_value:
            best_value, best_f = k, f
            if k <= lower_bound:
                break
    G = apply_representation(H, best_f)
    k, witness = closure_threshold_dimension(G)
    assert k == best_value
    _require(witness.verify(intersection_closure(G)), "extended threshold witness")
    return ExtendedThreshold(best_value, Representation(H.domain, best_f), witness)


# -- VC dimension one ----------------------------------------------------------

def verify_vcd1_representation(H: HypothesisClass, f: Representation | int) -> bool:
    """Closure of H^f keeps VC dimension 1 and the Threshold dimension of H^f."""
    G = apply_representation(H, f)
    closed = intersection_closure(G).as_class()
    return (
        vc_dimension(closed) == 1
        and threshold_dimension(G, "search")[0] == threshold_dimension(closed, "chain")[0]
    )


def find_vcd1_representation(H: HypothesisClass) -> Representation | None:
    """A member f of H making H^f a class of initial segments of a tree order.

    Any member works when the VC dimension is 1; the one whose closure has
    the smallest depth is returned (ties by class order). Returns None when
    the VC dimension is not 1.
    """
    if vc_dimension(H) != 1:
        return None
    best = min(H.masks, key=lambda f: closure_depth_masks([m ^ f for m in H.masks], H.n)[0])
    rep = Representation(H.domain, best)
    _require(verify_vcd1_representation(H, rep), "VC-1 representation")
    return rep


# -- reports -----------------------------------------------------------------

ALL_DIMENSIONS = ("vc", "ldim", "tdim", "depth", "extdim")


@dataclass
class DimensionReport:
    vc: int | None = None
    littlestone: int | None = None
    threshold: int | None = None
    threshold_witness: WitnessSet | None = None
    depth: int | None = None
    depth_chain: tuple[Hypothesis, ...] | None = None
    extended_threshold: int | None = None
    extended_representation: Representation | None = None
    extended_witness: WitnessSet | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict = {}
        if self.vc is not None:
            out["vc"] = self.vc
        if self.littlestone is not None:
            out["ldim"] = self.littlestone
        if self.threshold is not None:
            out["tdim"] = {"value": self.threshold, "witness": self.threshold_witness.to_json()}
        if self.depth is not None:
            out["depth"] = {"value": self.depth, "chain": [h.to_bitstring() for h in self.depth_chain]}
        if self.extended_threshold is not None:
            out["extdim"] = {
                "value": self.extended_threshold,
                "representation": self.extended_representation.to_bitstring(),
                "witness": self.extended_witness.to_json(),
            }
        out.update(self.extra)
        return out


def dimension_report(H: HypothesisClass, which: tuple[str, ...] | list[str] = ALL_DIMENSIONS) -> DimensionReport:
    unknown = set(which) - set(ALL_DIMENSIONS)
    if unknown:
        raise ValueError(f"unknown dimensions: {sorted(unknown)}")
    report = DimensionReport()
    if "vc" in which:
        report.vc = vc_dimension(H)
    if "ldim" in which:
        report.littlestone = littlestone_dimension(H)
    if "tdim" in which:
        report.threshold, report.threshold_witness = threshold_dimension(H)
    if "depth" in which:
        report.depth, report.depth_chain = chain_depth(H)
    if "extdim" in which:
        report.extended_threshold, report.extended_representation, report.extended_witness = (
            extended_threshold_dimension(H)
        )
    return report

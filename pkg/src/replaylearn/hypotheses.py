"""Finite-domain hypothesis classes stored as integer bit vectors.

Point ``i`` of a domain of size ``N`` is bit ``i`` of a hypothesis mask, so a
hypothesis is simultaneously a subset of ``{0, ..., N-1}`` and a function
``h(x) = (mask >> x) & 1``. Python integers are unbounded, so domains wider
than a machine word take the same code path; only operations that enumerate
all ``2**N`` subsets are capped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

ENUMERATION_CAP = 24


class DomainMismatchError(ValueError):
    """Objects defined over different domains were combined."""


class EnumerationCapError(ValueError):
    """An exhaustive computation was requested beyond its size cap."""


def check_cap(n: int, cap: int = ENUMERATION_CAP, what: str = "enumeration") -> None:
    if n > cap:
        raise EnumerationCapError(f"{what} needs domain size <= {cap}, got {n}")


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Domain:
    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"domain size must be >= 1, got {self.size}")

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def check_points(self, points: Iterable[int]) -> None:
        for x in points:
            if not 0 <= x < self.size:
                raise ValueError(f"point {x} outside domain of size {self.size}")


@dataclass(frozen=True)
class Hypothesis:
    """A subset of the domain, usable as a 0/1 function."""

    domain: Domain
    mask: int

    def __post_init__(self) -> None:
        if self.mask < 0 or self.mask >> self.domain.size:
            raise ValueError("hypothesis mask has bits outside the domain")

    @classmethod
    def from_points(cls, n: int, points: Iterable[int]) -> "Hypothesis":
        domain = Domain(n)
        points = list(points)
        domain.check_points(points)
        mask = 0
        for x in points:
            mask |= 1 << x
        return cls(domain, mask)

    @classmethod
    def from_bitstring(cls, bits: str) -> "Hypothesis":
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        return cls.from_points(len(bits), (i for i, c in enumerate(bits) if c == "1"))

    def __call__(self, x: int) -> int:
        return (self.mask >> x) & 1

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and 0 <= x < self.domain.size and bool((self.mask >> x) & 1)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.mask)

    @property
    def members(self) -> frozenset[int]:
        return frozenset(iter_bits(self.mask))

    def to_bitstring(self) -> str:
        return "".join("1" if (self.mask >> i) & 1 else "0" for i in range(self.domain.size))

    def __repr__(self) -> str:
        return f"Hypothesis({self.to_bitstring()})"


@dataclass(frozen=True)
class Representation:
    """A mask ``f``; the f-representation of ``h`` is ``h XOR f``."""

    domain: Domain
    mask: int = 0

    def __post_init__(self) -> None:
        if self.mask < 0 or self.mask >> self.domain.size:
            raise DomainMismatchError("representation mask has bits outside the domain")

    def __call__(self, x: int) -> int:
        return (self.mask >> x) & 1

    def apply(self, h: Hypothesis) -> Hypothesis:
        if h.domain != self.domain:
            raise DomainMismatchError("hypothesis and representation domains differ")
        return Hypothesis(self.domain, h.mask ^ self.mask)

    def to_bitstring(self) -> str:
        return Hypothesis(self.domain, self.mask).to_bitstring()


@dataclass(frozen=True)
class HypothesisClass:
    """A finite ordered collection of distinct hypotheses over one domain.

    Classes are nonempty, except the restriction returned by
    :func:`consistent_subclass`, which may be empty.
    """

    domain: Domain
    hypotheses: tuple[Hypothesis, ...]
    name: str = field(default="", compare=False)
    allow_empty: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.hypotheses and not self.allow_empty:
            raise ValueError("hypothesis class must be nonempty")
        seen = set()
        for h in self.hypotheses:
            if h.domain != self.domain:
                raise DomainMismatchError("all hypotheses must share the class domain")
            if h.mask in seen:
                raise ValueError(f"duplicate hypothesis {h.to_bitstring()}")
            seen.add(h.mask)

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int], name: str = "", allow_empty: bool = False) -> "HypothesisClass":
        domain = Domain(n)
        return cls(domain, tuple(Hypothesis(domain, m) for m in masks), name=name, allow_empty=allow_empty)

    @classmethod
    def from_bitstrings(cls, strings: Sequence[str], name: str = "") -> "HypothesisClass":
        hs = [Hypothesis.from_bitstring(s) for s in strings]
        if not hs:
            raise ValueError("hypothesis class must be nonempty")
        return cls(hs[0].domain, tuple(hs), name=name)

    @property
    def n(self) -> int:
        return self.domain.size

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(h.mask for h in self.hypotheses)

    @cached_property
    def mask_set(self) -> frozenset[int]:
        return frozenset(self.masks)

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self) -> Iterator[Hypothesis]:
        return iter(self.hypotheses)

    def __getitem__(self, i: int) -> Hypothesis:
        return self.hypotheses[i]

    def __contains__(self, h: object) -> bool:
        if isinstance(h, Hypothesis):
            return h.domain == self.domain and h.mask in self.mask_set
        if isinstance(h, int):
            return h in self.mask_set
        return False

    def hypothesis(self, mask: int) -> Hypothesis:
        return Hypothesis(self.domain, mask)

    def label_matrix(self) -> np.ndarray:
        """Boolean array of shape (|H|, N); row ``i`` is hypothesis ``i``."""
        out = np.zeros((len(self), self.n), dtype=bool)
        for i, m in enumerate(self.masks):
            for x in iter_bits(m):
                out[i, x] = True
        return out

    def to_json(self) -> dict:
        return {"domain_size": self.n, "hypotheses": [h.to_bitstring() for h in self.hypotheses]}

    def __repr__(self) -> str:
        label = self.name or "HypothesisClass"
        return f"<{label}: N={self.n}, |H|={len(self)}>"


LabeledExample = tuple[int, int]


def apply_representation(H: HypothesisClass, f: Representation | int) -> HypothesisClass:
    """Replace every hypothesis by its symmetric difference with ``f``."""
    if isinstance(f, int):
        f = Representation(H.domain, f)
    if f.domain != H.domain:
        raise DomainMismatchError(f"representation over N={f.domain.size}, class over N={H.n}")
    name = f"{H.name}^f" if H.name else ""
    return HypothesisClass.from_masks(H.n, (m ^ f.mask for m in H.masks), name=name)


def closure_of_masks(masks: Iterable[int], y: int, full: int) -> int:
    out = full
    found = False
    for m in masks:
        if m & y == y:
            out &= m
            found = True
    return out if found else full


def closure_of(H: HypothesisClass, Y: Iterable[int] | int) -> Hypothesis:
    """Intersection of all hypotheses containing ``Y``.

    When no hypothesis contains ``Y`` the empty intersection is the full
    domain.
    """
    if isinstance(Y, int):
        y = Y
        if y < 0 or y >> H.n:
            raise ValueError("point set outside domain")
    else:
        y = Hypothesis.from_points(H.n, Y).mask
    return Hypothesis(H.domain, closure_of_masks(H.masks, y, H.domain.full))


def closure_masks(masks: Sequence[int]) -> set[int]:
    """Fixpoint of ``masks`` under pairwise intersection."""
    base = list(dict.fromkeys(masks))
    elements = set(base)
    frontier = list(elements)
    while frontier:
        fresh = []
        for a in frontier:
            for b in base:
                c = a & b
                if c not in elements:
                    elements.add(c)
                    fresh.append(c)
        frontier = fresh
    return elements


@dataclass(frozen=True)
class ClosureFamily:
    """All nonempty intersections of a base class, with its containment order.

    ``elements`` is sorted by (size, mask), so every strict subset of an
    element appears before it.
    """

    base: HypothesisClass
    elements: tuple[Hypothesis, ...]

    @property
    def domain(self) -> Domain:
        return self.base.domain

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(e.mask for e in self.elements)

    @property
    def h_min(self) -> Hypothesis:
        return self.elements[0]

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, h: object) -> bool:
        if isinstance(h, Hypothesis):
            return h.mask in set(self.masks)
        return isinstance(h, int) and h in set(self.masks)

    @cached_property
    def strict_subsets(self) -> tuple[tuple[int, ...], ...]:
        """For each element index, indices of elements strictly below it."""
        masks = self.masks
        return tuple(
            tuple(j for j in range(i) if masks[j] & m == masks[j])
            for i, m in enumerate(masks)
        )

    def as_class(self) -> HypothesisClass:
        name = f"closure({self.base.name})" if self.base.name else ""
        return HypothesisClass(self.domain, self.elements, name=name)


def intersection_closure(H: HypothesisClass) -> ClosureFamily:
    elements = sorted(closure_masks(H.masks), key=lambda m: (popcount(m), m))
    return ClosureFamily(H, tuple(Hypothesis(H.domain, m) for m in elements))


def is_intersection_closed(H: HypothesisClass) -> bool:
    members = H.mask_set
    masks = H.masks
    for i, a in enumerate(masks):
        for b in masks[i + 1:]:
            if a & b not in members:
                return False
    return True


def consistent_subclass(H: HypothesisClass, examples: Iterable[LabeledExample]) -> HypothesisClass:
    """All hypotheses agreeing with every labeled example (possibly none)."""
    ones = zeros = 0
    for x, y in examples:
        H.domain.check_points([x])
        if y:
            ones |= 1 << x
        else:
            zeros |= 1 << x
    kept = [m for m in H.masks if m & ones == ones and not m & zeros]
    return HypothesisClass.from_masks(H.n, kept, name=H.name, allow_empty=True)


# -- generators ------------------------------------------------------------

def thresholds(n: int) -> HypothesisClass:
    """``f_0 = {}`` and ``f_k = {x >= k}`` for k = 1..N (1-based ``k``)."""
    full = (1 << n) - 1
    masks = [0] + [full ^ ((1 << (k - 1)) - 1) for k in range(1, n + 1)]
    return HypothesisClass.from_masks(n, masks, name=f"thresholds:{n}")


def singletons(n: int) -> HypothesisClass:
    return HypothesisClass.from_masks(n, [0] + [1 << i for i in range(n)], name=f"singletons:{n}")


def reverse_singletons(n: int) -> HypothesisClass:
    full = (1 << n) - 1
    return HypothesisClass.from_masks(n, [full] + [full ^ (1 << i) for i in range(n)], name=f"reverse_singletons:{n}")


def blowup(n: int) -> HypothesisClass:
    """Singletons and reverse singletons (plus both constants) on ``2n`` points."""
    m = 2 * n
    full = (1 << m) - 1
    masks = [0] + [1 << i for i in range(m)] + [full] + [full ^ (1 << i) for i in range(m)]
    return HypothesisClass.from_masks(m, masks, name=f"blowup:{n}")


def _interval(a: int, b: int) -> int:
    return ((1 << (b + 1)) - 1) ^ ((1 << a) - 1)


def intervals(n: int) -> HypothesisClass:
    """The empty set and all integer intervals; intersection-closed with VC dimension 2."""
    masks = [0] + [_interval(a, b) for a in range(n) for b in range(a, n)]
    return HypothesisClass.from_masks(n, masks, name=f"intervals:{n}")


def two_intervals(n: int) -> HypothesisClass:
    """Unions of at most two integer intervals of ``{0, ..., n-1}``.

    Includes the empty set and single intervals; sorted by size so that the
    empty set comes first.
    """
    ivs = [_interval(a, b) for a in range(n) for b in range(a, n)]
    masks = {0}
    masks.update(ivs)
    for a in range(n):
        for b in range(a, n):
            for c in range(b + 2, n):
                for d in range(c, n):
                    masks.add(_interval(a, b) | _interval(c, d))
    ordered = sorted(masks, key=lambda m: (popcount(m), m))
    return HypothesisClass.from_masks(n, ordered, name=f"two_intervals:{n}")


def power_set(n: int) -> HypothesisClass:
    check_cap(n)
    return HypothesisClass.from_masks(n, range(1 << n), name=f"powerset:{n}")


def random_class(n: int, size: int, rng: np.random.Generator) -> HypothesisClass:
    """``size`` distinct uniformly random subsets of an ``n``-point domain."""
    check_cap(n)
    size = min(size, 1 << n)
    picks = rng.choice(1 << n, size=size, replace=False)
    return HypothesisClass.from_masks(n, (int(p) for p in picks), name=f"random:{n}x{size}")


GENERATORS = {
    "thresholds": thresholds,
    "singletons": singletons,
    "reverse_singletons": reverse_singletons,
    "blowup": blowup,
    "intervals": intervals,
    "two_intervals": two_intervals,
    "powerset": power_set,
}


def load_class(path: str | Path) -> HypothesisClass:
    data = json.loads(Path(path).read_text())
    H = HypothesisClass.from_bitstrings(data["hypotheses"], name=Path(path).stem)
    if H.n != data["domain_size"]:
        raise DomainMismatchError(f"bit strings have length {H.n}, domain_size is {data['domain_size']}")
    return H


def save_class(H: HypothesisClass, path: str | Path) -> None:
    Path(path).write_text(json.dumps(H.to_json(), indent=1))


def class_from_spec(spec: str) -> HypothesisClass:
    """Resolve ``name:N`` generator specs or a JSON class file path."""
    name, sep, arg = spec.partition(":")
    if sep and name in GENERATORS:
        return GENERATORS[name](int(arg))
    if Path(spec).exists():
        return load_class(spec)
    raise ValueError(f"unknown class spec {spec!r}; generators: {', '.join(GENERATORS)}")


def all_subsets(points: Sequence[int], k: int) -> Iterator[int]:
    for combo in combinations(points, k):
        mask = 0
        for x in combo:
            mask |= 1 << x
        yield mask

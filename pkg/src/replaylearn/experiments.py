"""Desk-scale experiments: mistake-bound rows, proper/improper separation, convex scaling.

Each experiment returns a list of :class:`ResultRow`. Bounds are computed
from :mod:`replaylearn.dimensions` when the experiment runs. Trial ``i`` of a
run with master seed ``s`` draws from ``SeedSequence(s, spawn_key=(stream, i))``
so results do not depend on how trials are scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .adversaries import (
    ConvexUniformAdversary,
    DescendingAdversary,
    GeometricStochasticAdversary,
    ReplayFirstAdversary,
    WitnessChainAdversary,
    convex_mistake_times,
    make_adversary,
)
from .dimensions import (
    closure_threshold_dimension,
    extended_threshold_dimension,
    threshold_dimension,
    vc_dimension,
)
from .engine import GameTranscript, run_game
from .hypotheses import class_from_spec, is_intersection_closed, thresholds, two_intervals
from .learners import ClosureLearner, ConservativeThresholdLearner, ConvexHullLearner, make_learner

WORKERS_ENV = "REPLAYLEARN_WORKERS"
CSV_COLUMNS = ("experiment", "class", "learner", "adversary", "N", "T", "trial", "mistakes", "bound", "pass")
TABLE1_ROWS = ("thresholds-adaptive", "thresholds-stochastic", "intclosed-adaptive",
               "general-adaptive", "general-stochastic")
CONVEX_BODY = {1: "interval", 2: "disk", 3: "ball"}
# harness tolerance bands for the log-log slope of convex mistakes
CONVEX_SLOPE_BAND = {2: (0.18, 0.48), 3: (0.35, 0.65)}
CONVEX_T_GRID = tuple(2 ** k for k in range(6, 13))


class InvalidTranscriptError(RuntimeError):
    pass


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, trial)))


def workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def map_trials(fn, args: list) -> list:
    """Apply ``fn`` to every argument tuple, optionally in worker processes; order is kept."""
    n = workers()
    if n == 1 or len(args) < 2:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, *zip(*args)))


def checked(transcript: GameTranscript) -> int:
    if not transcript.valid:
        raise InvalidTranscriptError(transcript.violation)
    return transcript.mistakes


@dataclass
class ExperimentConfig:
    experiment: str
    class_spec: str | None = None
    learner: str | None = None
    adversary: str | None = None
    rounds: int | None = None
    trials: int = 1
    seed: int = 0
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")


@dataclass
class ResultRow:
    """Per-trial mistake counts for one (class, learner, adversary, T) cell.

    ``lower``/``upper`` form the acceptance band for the mean; ``status`` is
    pass, fail or inconclusive. Fit rows (convex slopes) carry ``estimate``
    and ``interval`` instead of counts.
    """

    experiment: str
    cls: str
    learner: str
    adversary: str
    N: int
    T: int
    counts: list[int]
    bound: float
    lower: float = -math.inf
    upper: float = math.inf
    status: str = ""
    estimate: float | None = None
    interval: tuple[float, float] | None = None
    note: str = ""

    def __post_init__(self):
        if not self.status:
            self.status = judge(self.mean, self.stderr, self.lower, self.upper)

    @property
    def mean(self) -> float:
        if self.estimate is not None:
            return self.estimate
        return float(np.mean(self.counts)) if self.counts else math.nan

    @property
    def stderr(self) -> float:
        if self.estimate is not None or len(self.counts) < 2:
            return 0.0
        return float(np.std(self.counts, ddof=1) / math.sqrt(len(self.counts)))

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = asdict(self)
        out["class"] = out.pop("cls")
        out.update(mean=self.mean, stderr=self.stderr)
        for key in ("lower", "upper", "bound"):
            if math.isinf(out[key]):
                out[key] = None
        return out

    def summary(self) -> str:
        band = f"[{_fmt(self.lower)}, {_fmt(self.upper)}]"
        return (f"{self.experiment} {self.cls} {self.learner} vs {self.adversary} T={self.T}: "
                f"mean={self.mean:.4g} se={self.stderr:.3g} band={band} -> {self.status}")


def _fmt(v: float) -> str:
    return str(v) if math.isinf(v) else f"{v:.4g}"


def judge(mean: float, se: float, lower: float, upper: float) -> str:
    """pass: mean in band with SE under 10% of the band width.

    A mean outside the band by more than two standard errors fails; anything
    else is inconclusive. Exact (zero-width) bands need zero spread.
    """
    if math.isnan(mean):
        return "inconclusive"
    if lower <= mean <= upper:
        width = upper - lower
        return "pass" if se == 0 or se < 0.1 * width else "inconclusive"
    gap = lower - mean if mean < lower else mean - upper
    return "fail" if gap > 2 * se else "inconclusive"


def overall_status(rows: list[ResultRow]) -> str:
    statuses = {r.status for r in rows}
    if "fail" in statuses:
        return "fail"
    if "inconclusive" in statuses:
        return "inconclusive"
    return "pass"


# -- output --------------------------------------------------------------------

def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        bound = "" if math.isinf(r.bound) else repr(r.bound)
        if r.estimate is not None:
            writer.writerow([r.experiment, r.cls, r.learner, r.adversary, r.N, r.T, "fit",
                             repr(r.estimate), bound, r.status])
            continue
        for i, m in enumerate(r.counts):
            writer.writerow([r.experiment, r.cls, r.learner, r.adversary, r.N, r.T, i, m, bound, r.status])
    return buf.getvalue()


def rows_to_json(rows: list[ResultRow]) -> str:
    return json.dumps([r.to_json() for r in rows], indent=1, sort_keys=True) + "\n"


def write_rows(rows: list[ResultRow], path: str | None, fmt: str = "csv") -> str:
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


# -- trial workers (module level so they pickle) ---------------------------------

def _conservative_uniform_trial(n: int, T: int, seed: int, trial: int) -> int:
    H = thresholds(n)
    adv = make_adversary("uniform_stochastic", H, rng=trial_rng(seed, trial))
    return checked(run_game(ConservativeThresholdLearner(n), adv, H, T))


def _geometric_trial(spec: str, learner: str, T: int, seed: int, trial: int) -> int:
    H = class_from_spec(spec)
    adv = GeometricStochasticAdversary(H, trial_rng(seed, trial, stream=1))
    return checked(run_game(make_learner(learner, H), adv, H, T))


def _convex_trial(d: int, T: int, seed: int, trial: int) -> list[int]:
    adv = ConvexUniformAdversary(CONVEX_BODY[d], trial_rng(seed, trial, stream=2))
    return convex_mistake_times(ConvexHullLearner(d), adv.sample(T))


# -- Table 1 -------------------------------------------------------------------

def thresholds_adaptive(n: int = 16, T: int = 64) -> ResultRow:
    H = thresholds(n)
    tdim, _ = threshold_dimension(H)
    m = checked(run_game(ConservativeThresholdLearner(n), DescendingAdversary(n), H, T))
    bound = min(tdim, T)
    return ResultRow("thresholds-adaptive", H.name, "conservative_threshold", "descending",
                     n, T, [m], bound, bound, bound)


def thresholds_stochastic_upper(n: int = 1024, T: int = 1024, trials: int = 500, seed: int = 0) -> ResultRow:
    """Conservative learner, uniform points, all-ones target: mean within [ln m / 2, ln m + 2], m = min(N, T)."""
    counts = map_trials(_conservative_uniform_trial, [(n, T, seed, i) for i in range(trials)])
    scale = math.log(min(n, T))
    return ResultRow("thresholds-stochastic-upper", f"thresholds:{n}", "conservative_threshold",
                     "uniform_stochastic", n, T, counts, scale, 0.5 * scale, scale + 2)


def stochastic_lower_bound(dim: int, T: int) -> float:
    """min(dim, floor(log2(T) / 2)) / 3; equals N/3 on thresholds once log2 T > 2N."""
    return min(dim, int(math.log2(T)) // 2) / 3


def thresholds_stochastic_lower(n: int = 3, T: int = 128, trials: int = 500, seed: int = 0) -> ResultRow:
    H = thresholds(n)
    tdim, _ = threshold_dimension(H)
    counts = map_trials(_geometric_trial, [(H.name, "conservative_threshold", T, seed, i) for i in range(trials)])
    bound = stochastic_lower_bound(tdim, T)
    return ResultRow("thresholds-stochastic-lower", H.name, "conservative_threshold",
                     "geometric_stochastic", n, T, counts, bound, bound)


def intclosed_adaptive(spec: str = "thresholds:10", T: int = 50) -> ResultRow:
    H = class_from_spec(spec)
    tdim, _ = threshold_dimension(H)
    m = checked(run_game(ClosureLearner(H), WitnessChainAdversary(H), H, T))
    bound = min(tdim, T)
    return ResultRow("intclosed-adaptive", H.name, "closure", "witness_chain", H.n, T, [m], bound, bound, bound)


def general_adaptive(spec: str = "blowup:4", T: int = 50) -> list[ResultRow]:
    """closure_extdim stays within ExtTDim; the f = 0 closure learner exceeds TDim."""
    H = class_from_spec(spec)
    ext = extended_threshold_dimension(H).value
    tdim, _ = threshold_dimension(H)
    smart = checked(run_game(make_learner("closure_extdim", H), WitnessChainAdversary(H), H, T))
    naive = checked(run_game(ClosureLearner(H), WitnessChainAdversary(H), H, T))
    return [
        ResultRow("general-adaptive", H.name, "closure_extdim", "witness_chain", H.n, T, [smart], ext, 0, ext),
        ResultRow("general-adaptive-naive", H.name, "closure", "witness_chain", H.n, T, [naive], tdim, tdim + 1,
                  note="f = 0 closure learner; expected above TDim when ExtTDim > TDim"),
    ]


def general_stochastic(spec: str = "intervals:8", T: int = 1024, trials: int = 200, seed: int = 0) -> list[ResultRow]:
    """Closure learner vs the geometric witness adversary.

    Lower envelope min(ExtTDim, log2(T)/2)/3. Upper envelope
    min(TDim(closure), vc * (ln T + 2)); it is only asserted for
    intersection-closed inputs.
    """
    H = class_from_spec(spec)
    ext = extended_threshold_dimension(H).value
    ctdim, _ = closure_threshold_dimension(H)
    vc = vc_dimension(H)
    counts = map_trials(_geometric_trial, [(spec, "closure", T, seed, i) for i in range(trials)])
    lower = stochastic_lower_bound(ext, T)
    upper = min(ctdim, vc * (math.log(T) + 2))
    rows = [ResultRow("general-stochastic-lower", H.name, "closure", "geometric_stochastic", H.n, T,
                      counts, lower, lower)]
    if is_intersection_closed(H):
        rows.append(ResultRow("general-stochastic-upper", H.name, "closure", "geometric_stochastic", H.n, T,
                              counts, upper, 0, upper))
    return rows


def reproduce_table1(row: str, *, spec: str | None = None, T: int | None = None,
                     trials: int | None = None, seed: int = 0) -> list[ResultRow]:
    if row == "thresholds-adaptive":
        n = class_from_spec(spec).n if spec else 16
        return [thresholds_adaptive(n, T or 4 * n)]
    if row == "thresholds-stochastic":
        n = class_from_spec(spec).n if spec else 1024
        T = T or 1024
        return [thresholds_stochastic_upper(n, T, trials or 500, seed),
                thresholds_stochastic_lower(n, T, trials or 500, seed)]
    if row == "intclosed-adaptive":
        return [intclosed_adaptive(spec or "thresholds:10", T or 50)]
    if row == "general-adaptive":
        return general_adaptive(spec or "blowup:4", T or 50)
    if row == "general-stochastic":
        return general_stochastic(spec or "intervals:8", T or 1024, trials or 200, seed)
    raise ValueError(f"unknown Table 1 row {row!r}; known: {', '.join(TABLE1_ROWS)}")


# -- separation ----------------------------------------------------------------

def separation_demo(n: int = 12, T: int = 200, seed: int = 0, halving_n: int = 8) -> list[ResultRow]:
    """Proper learners get trapped on two intervals; the closure learner does not."""
    H = two_intervals(n)
    greedy = checked(run_game(make_learner("greedy_proper", H), WitnessChainAdversary(H), H, T))
    closure = checked(run_game(ClosureLearner(H), WitnessChainAdversary(H), H, T))
    rows = [
        ResultRow("separation-proper", H.name, "greedy_proper", "witness_chain", n, T, [greedy],
                  T / 4 - 3, T / 4 - 3),
        ResultRow("separation-improper", H.name, "closure", "witness_chain", n, T, [closure],
                  n + 1, 0, n + 1),
    ]

    # halving trusts replayed labels and throws the target away
    Ht = thresholds(halving_n)
    target = Ht.masks[0]
    learner = make_learner("halving", Ht)
    adv = ReplayFirstAdversary(Ht, target, trial_rng(seed, 0, stream=3))
    checked(run_game(learner, adv, Ht, halving_n, target=target))
    ejected = int(target not in learner.version_space)
    rows.append(ResultRow("separation-halving", Ht.name, "halving", "replay_first", halving_n, halving_n,
                          [ejected], 1, 1, 1, note="1 = target left the halving version space"))

    tdim, _ = threshold_dimension(thresholds(n))
    Hc = thresholds(n)
    proper = checked(run_game(ClosureLearner(Hc), WitnessChainAdversary(Hc), Hc, T))
    rows.append(ResultRow("separation-intclosed", Hc.name, "closure", "witness_chain", n, T, [proper],
                          tdim, 0, tdim))
    return rows


# -- convex scaling ------------------------------------------------------------

def convex_counts(d: int, grid=CONVEX_T_GRID, trials: int = 200, seed: int = 0) -> np.ndarray:
    """(trials, len(grid)) array of mistakes by round T for each T in ``grid``."""
    grid = np.asarray(grid)
    times = map_trials(_convex_trial, [(d, int(grid.max()), seed, i) for i in range(trials)])
    return np.array([np.searchsorted(np.asarray(t, dtype=int), grid, side="left") for t in times])


def _residuals(x: np.ndarray, y: np.ndarray) -> float:
    """Sum of squared residuals of the least-squares line y ~ a + b x."""
    A = np.column_stack([x, np.ones_like(x)])
    coef = np.linalg.lstsq(A, y, rcond=None)[0]
    return float(((A @ coef - y) ** 2).sum())


def loglog_slope(grid, means) -> float:
    return float(np.polyfit(np.log(grid), np.log(means), 1)[0])


def convex_scaling(d: int, grid=CONVEX_T_GRID, trials: int = 200, seed: int = 0,
                   boot: int = 500) -> list[ResultRow]:
    """Per-T mistake rows plus one fit row.

    d = 1: per-T band [ln T / 2, 3 ln T + 4] and a fit row comparing the
    least-squares residual of a + b ln T with that of a + b T (the estimate
    is the ratio; pass when below 1). d >= 2: log-log slope with a bootstrap
    interval over trials, judged against the harness band.
    """
    if d not in CONVEX_BODY:
        raise ValueError("d must be 1, 2 or 3")
    grid = np.asarray(grid, dtype=float)
    counts = convex_counts(d, grid.astype(int), trials, seed)
    body = CONVEX_BODY[d]
    rows = []
    exponent = (d - 1) / (d + 1)
    for j, T in enumerate(grid.astype(int)):
        if d == 1:
            lower, upper, bound = 0.5 * math.log(T), 3 * math.log(T) + 4, math.log(T)
        else:
            lower, upper, bound = -math.inf, math.inf, T ** exponent
        rows.append(ResultRow(f"convex-d{d}", body, "convex_hull", "convex_uniform", d, int(T),
                              counts[:, j].tolist(), bound, lower, upper))
    means = counts.mean(axis=0)
    rng = trial_rng(seed, 0, stream=4)
    if d == 1:
        ratio = _residuals(np.log(grid), means) / _residuals(grid, means)
        rows.append(ResultRow("convex-d1-fit", body, "convex_hull", "convex_uniform", d, int(grid.max()),
                              [], 1.0, 0.0, 1.0, estimate=ratio, status="pass" if ratio < 1 else "fail",
                              note="residual(log fit) / residual(linear fit)"))
        return rows
    slope = loglog_slope(grid, means)
    samples = []
    for _ in range(boot):
        pick = rng.integers(len(counts), size=len(counts))
        samples.append(loglog_slope(grid, counts[pick].mean(axis=0)))
    lo, hi = np.percentile(samples, [2.5, 97.5])
    band = CONVEX_SLOPE_BAND[d]
    rows.append(ResultRow(f"convex-d{d}-fit", body, "convex_hull", "convex_uniform", d, int(grid.max()),
                          [], exponent, band[0], band[1], estimate=slope, interval=(float(lo), float(hi)),
                          status="pass" if band[0] <= slope <= band[1] else "fail",
                          note="log-log slope with 95% bootstrap interval"))
    return rows

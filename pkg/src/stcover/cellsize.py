"""Grid cell size selection under path-length and time budgets.

A binary phase narrows the candidate ladder using the length/time estimates,
then a linear phase walks coarser sizes tracking the best predicted coverage,
stopping after a fixed patience of non-improvements. Candidates above the
vehicle's sensing range can never be observed properly and are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .prediction import Budget, PlanPrediction


@dataclass
class CandidateLadder:
    """Ascending cell-size candidates."""

    sizes: list[float]

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("ladder must not be empty")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("ladder sizes must be strictly ascending")

    @staticmethod
    def from_range(cs_min: float, cs_max: float, step: float) -> "CandidateLadder":
        if step <= 0.0 or cs_min <= 0.0 or cs_max < cs_min:
            raise ValueError(f"invalid ladder range [{cs_min}, {cs_max}] step {step}")
        sizes = []
        k = 0
        while True:
            cs = cs_min + k * step
            if cs > cs_max + 1e-9:
                break
            sizes.append(round(cs, 9))
            k += 1
        return CandidateLadder(sizes)

    @property
    def granularity(self) -> float:
        if len(self.sizes) < 2:
            return 0.0
        return self.sizes[1] - self.sizes[0]


@dataclass
class Evaluation:
    size: float
    path_length: float
    turnaround_time: float
    coverage_percent: float
    feasible: bool


@dataclass
class SearchOutcome:
    feasible: bool
    chosen_index: int | None
    chosen_size: float | None
    prediction: PlanPrediction | None
    evaluations: list[Evaluation] = field(default_factory=list)
    reason: str | None = None
    binary_evaluations: int = 0


@dataclass
class Violation:
    constraint: str
    limit: float
    actual: float

    @property
    def margin(self) -> float:
        return self.actual - self.limit


def _within(value: float, limit: float) -> bool:
    # treat near-exact equality as meeting the budget
    return value <= limit or math.isclose(value, limit, rel_tol=1e-9)


def optimize_cell_size(
    evaluate: Callable[[float], PlanPrediction | None],
    ladder: CandidateLadder,
    budget: Budget,
    patience: int = 10,
    sensing_range: float = math.inf,
    strict_paper_search: bool = True,
) -> SearchOutcome:
    """Pick the cell size meeting the budgets with the best predicted coverage.

    Args:
        evaluate: full planning pipeline for one cell size; may return None
            when no plan exists at that size (e.g. no free cells survive).
        ladder: ascending candidate sizes.
        budget: length/time limits a plan must satisfy.
        patience: consecutive non-improvements tolerated in the linear phase.
        sensing_range: sizes above this can never be fully observed and are
            treated as unusable.
        strict_paper_search: keep the published AND of the two over-budget
            conditions in the binary phase; False switches to the
            conventional OR.

    Returns:
        SearchOutcome. When no candidate satisfies every constraint the
        outcome carries feasible=False and a reason instead of a choice.
    """
    sizes = ladder.sizes
    n = len(sizes)
    cache: dict[int, PlanPrediction | None] = {}
    evaluations: list[Evaluation] = []

    def run(idx: int) -> PlanPrediction | None:
        if idx not in cache:
            pred = evaluate(sizes[idx])
            cache[idx] = pred
            if pred is None:
                evaluations.append(Evaluation(sizes[idx], math.inf, math.inf, 0.0, False))
            else:
                evaluations.append(
                    Evaluation(
                        sizes[idx],
                        pred.path_length,
                        pred.turnaround_time,
                        pred.coverage_percent,
                        _feasible(pred),
                    )
                )
        return cache[idx]

    def _feasible(pred: PlanPrediction) -> bool:
        return _within(pred.path_length, budget.max_path_length) and _within(
            pred.turnaround_time, budget.max_time
        )

    lo, hi = 0, n - 1
    binary_count = 0
    while lo < hi:
        mid = (lo + hi) // 2
        pred = run(mid)
        binary_count += 1
        if pred is None:
            lo = mid + 1
            continue
        over_l = pred.path_length > budget.max_path_length and not math.isclose(
            pred.path_length, budget.max_path_length, rel_tol=1e-9
        )
        over_t = pred.turnaround_time > budget.max_time and not math.isclose(
            pred.turnaround_time, budget.max_time, rel_tol=1e-9
        )
        exact = math.isclose(pred.path_length, budget.max_path_length, rel_tol=1e-9) and math.isclose(
            pred.turnaround_time, budget.max_time, rel_tol=1e-9
        )
        over = (over_l and over_t) if strict_paper_search else (over_l or over_t)
        if exact:
            lo = hi = mid
            break
        if over:
            lo = mid + 1
        else:
            hi = mid - 1

    best_idx: int | None = None
    best_cp = -math.inf
    misses = 0
    hit_sensing_guard = False
    m = max(0, min(lo, hi))
    while m < n:
        if sizes[m] > sensing_range + 1e-12:
            hit_sensing_guard = True
            break  # cells coarser than the sensor can see are unusable
        pred = run(m)
        improved = False
        if pred is not None and _feasible(pred) and pred.coverage_percent > best_cp:
            best_cp = pred.coverage_percent
            best_idx = m
            improved = True
        if improved:
            misses = 0
        else:
            misses += 1
        if misses == patience:
            break
        m += 1

    if best_idx is None:
        if not any(s <= sensing_range + 1e-12 for s in sizes):
            reason = "every candidate exceeds the sensing range"
        elif hit_sensing_guard:
            reason = "no candidate within the sensing range satisfies the budgets"
        else:
            reason = "no candidate satisfies the budgets"
        return SearchOutcome(False, None, None, None, evaluations, reason, binary_count)

    return SearchOutcome(
        True,
        best_idx,
        sizes[best_idx],
        cache[best_idx],
        evaluations,
        None,
        binary_count,
    )


def validate_plan(
    prediction: PlanPrediction,
    budget: Budget,
    trace: list[tuple[float, float]] | None = None,
    dt: float | None = None,
) -> list[Violation]:
    """Report every violated budget constraint with its margin.

    Args:
        prediction: plan estimates to audit.
        budget: limits.
        trace: optional simulated positions of the formation center, one per
            tick, audited against the per-step speed limit.
        dt: tick duration, required when a trace is given.
    """
    violations: list[Violation] = []
    if not _within(prediction.path_length, budget.max_path_length):
        violations.append(
            Violation("path_length", budget.max_path_length, prediction.path_length)
        )
    if not _within(prediction.turnaround_time, budget.max_time):
        violations.append(Violation("turnaround_time", budget.max_time, prediction.turnaround_time))
    if trace is not None:
        if dt is None or dt <= 0.0:
            raise ValueError("dt required to audit a trace")
        step_limit = budget.max_speed * dt
        worst = 0.0
        for (x0, y0), (x1, y1) in zip(trace, trace[1:]):
            step = math.hypot(x1 - x0, y1 - y0)
            worst = max(worst, step)
        if worst > step_limit * (1.0 + 1e-9):
            violations.append(Violation("step_displacement", step_limit, worst))
    return violations

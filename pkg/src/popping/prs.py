"""Generic partial rejection sampling engine for extremal instances.

The engine repeatedly detects occurring bad events and resamples exactly
the variables those events depend on, until no bad event occurs.  On
extremal instances (occurring events never share variables) the final
assignment is an exact draw from the product distribution conditioned on
no bad event.

This is the readable reference implementation; the per-sampler modules
provide equivalent compiled kernels and are tested to consume resampling
tables identically, draw for draw.
"""

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import DrawBudgetExceeded, ExtremalityViolation

__all__ = ["PrsInstance", "RunStats", "run_prs", "DEFAULT_MAX_DRAWS"]

DEFAULT_MAX_DRAWS = 10 ** 9


@dataclass
class RunStats:
    """Draw accounting for one sampler run.

    resampled_vars excludes initialization; theorem-style totals are
    init_draws + resampled_vars.
    """

    init_draws: int = 0
    resampled_vars: int = 0
    rounds: int = 0
    per_variable_resamples: np.ndarray = field(
        default_factory=lambda: np.zeros(0, dtype=np.int64))
    wall_time: float = 0.0

    @property
    def total_draws(self):
        return self.init_draws + self.resampled_vars

    def validate(self):
        assert self.resampled_vars == int(self.per_variable_resamples.sum())
        return self

    def to_report(self, include_wall_time=False):
        """Serializable summary; per-variable counts reduced to a histogram
        summary so reports stay small."""
        pv = self.per_variable_resamples
        report = {
            "init_draws": int(self.init_draws),
            "resampled_vars": int(self.resampled_vars),
            "total_draws": int(self.total_draws),
            "rounds": int(self.rounds),
            "per_variable": {
                "min": int(pv.min()) if pv.size else 0,
                "mean": float(pv.mean()) if pv.size else 0.0,
                "max": int(pv.max()) if pv.size else 0,
            },
        }
        if include_wall_time:
            report["wall_time"] = self.wall_time
        return report


@dataclass
class PrsInstance:
    """An extremal-instance encoding.

    variables:       the table stream ids carrying this instance's variables
    draw_value:      (var, unit uniform) -> sampled value of that variable
    occurring_events: assignment dict -> list of (event key, vbl tuple);
                      must be a pure function of the assignment, and every
                      vbl must be nonempty
    describe:        optional label for error messages
    """

    variables: Sequence[int]
    draw_value: Callable[[int, float], Any]
    occurring_events: Callable[[dict], list]
    describe: str = "prs instance"


def run_prs(instance, table, extremality_check=True,
            max_draws=DEFAULT_MAX_DRAWS):
    """Run the resampling loop to completion; returns (assignment, RunStats).

    With extremality_check on, every round asserts that the occurring bad
    events have pairwise disjoint variable sets; a violation means the
    instance encoding is broken, not bad luck.  The draw cap converts
    nontermination on infeasible instances into DrawBudgetExceeded.
    """
    t0 = time.perf_counter()
    variables = list(instance.variables)
    var_pos = {v: i for i, v in enumerate(variables)}
    per_var = np.zeros(len(variables), dtype=np.int64)
    assignment = {v: instance.draw_value(v, table.draw(v)) for v in variables}
    draws = len(variables)
    resampled = 0
    rounds = 0
    while True:
        events = instance.occurring_events(assignment)
        if not events:
            break
        if extremality_check:
            seen = set()
            for _, vbl in events:
                if not vbl:
                    raise ExtremalityViolation(
                        f"{instance.describe}: event with empty variable set")
                for v in vbl:
                    if v in seen:
                        raise ExtremalityViolation(
                            f"{instance.describe}: occurring events share "
                            f"variable {v}")
                    seen.add(v)
        rounds += 1
        union = sorted({v for _, vbl in events for v in vbl})
        for v in union:
            assignment[v] = instance.draw_value(v, table.draw(v))
            per_var[var_pos[v]] += 1
        resampled += len(union)
        draws += len(union)
        if draws > max_draws:
            raise DrawBudgetExceeded(max_draws)
    stats = RunStats(
        init_draws=len(variables),
        resampled_vars=resampled,
        rounds=rounds,
        per_variable_resamples=per_var,
        wall_time=time.perf_counter() - t0,
    )
    return assignment, stats.validate()

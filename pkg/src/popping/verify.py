"""Oracle-backed verification suites.

Each suite compares sampler behaviour against exhaustive enumeration on the
small-instance grids:

  distributions   empirical TV distance to the exact target distribution
  expectations    empirical mean resampled variables vs the exact value
  identity        brute-force reachability equals brute-force reliability
                  on bi-directed versions (gates the annealing design)
  bounds          draw-count and table-depth bounds on every grid instance

One batch of runs per instance feeds all suites; a VerificationContext
caches those batches so `--suite all` costs the same as one pass.

TV thresholds: an n-sample empirical distribution has expected TV distance
E0 > 0 from its own source, and E0 approaches 1 once the support size
rivals n, so a fixed cutoff cannot certify exactness on large supports.
Each instance is therefore tested against 0.01 + E0 with E0 computed in
closed form from the exact distribution; on small supports E0 is well
under 0.01 and this matches the plain cutoff.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from . import cluster_popping, cycle_popping, sink_popping
from .graph import bidirect
from .grids import connected_graphs, tree_free_connected_graphs
from .oracle import (ClusterSpace, exact_cycle_summary, exact_sink_summary,
                     expected_empirical_tv, tv_distance)
from .reliability import brute_force_Zreach, brute_force_Zrel
from .tables import derive_seed

__all__ = ["VerificationContext", "SuiteResult", "run_suites", "SUITES"]

SUITES = ("distributions", "expectations", "identity", "bounds")

P_GRID = (0.2, 0.5, 0.8)
MAX_N = 5
TV_BUDGET = 0.01
STDERR_SIGMAS = 3.0


@dataclass
class SuiteResult:
    """Rows plus the suite-level verdict.

    Statistical suites test hundreds of instances at 3 standard errors, so
    a correct sampler still trips a few by chance (about 0.27% of them).
    The verdict therefore allows up to the 99.9% binomial quantile of
    3-sigma excursions, while any single excursion beyond 5 sigma
    (hard_fail) fails the suite outright.
    """

    suite: str
    rows: list = field(default_factory=list)
    statistical: bool = False

    @property
    def allowed_failures(self):
        if not self.statistical:
            return 0
        n = len(self.rows)
        p = 0.0027  # two-sided 3-sigma tail
        k = 0
        while binom.sf(k, n, p) >= 1e-3:
            k += 1
        return k

    @property
    def passed(self):
        if any(r.get("hard_fail") for r in self.rows):
            return False
        return self.n_failed <= self.allowed_failures

    @property
    def n_failed(self):
        return sum(not r["pass"] for r in self.rows)


def _mean_stderr(values):
    values = np.asarray(values, dtype=np.float64)
    mean = float(values.mean())
    if values.shape[0] < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(values.shape[0]))


class VerificationContext:
    """Runs each grid instance once and serves every suite from the results."""

    def __init__(self, seed=1, samples=100_000, max_n=MAX_N):
        self.seed = seed
        self.samples = samples
        self.max_n = max_n
        self._cluster = None
        self._cycle = None
        self._sink = None
        self._identity = None

    # -- cluster grid -------------------------------------------------------

    def cluster_results(self):
        if self._cluster is None:
            self._cluster = list(self._run_cluster_grid())
        return self._cluster

    def _run_cluster_grid(self):
        combo = 0
        for label, g in connected_graphs(self.max_n, p=0.5):
            d = bidirect(g)
            for r in range(g.n):
                space = ClusterSpace(d, r)
                for p in P_GRID:
                    p_arr = np.full(d.m, p)
                    yield self._cluster_combo(label, d, r, p, p_arr, space,
                                              combo)
                    combo += 1

    def _cluster_combo(self, label, d, r, p, p_arr, space, combo):
        summary = space.summary(p_arr)
        batch = cluster_popping.batch_sample(
            d, r, derive_seed(self.seed, 1, combo),
            self.samples, algorithm="tarjan", p_override=p_arr,
            collect_keys=True, check=True)
        res = self._common_results(f"cluster[{label},r={r},p={p}]",
                                   summary, batch)
        n, m = d.n, d.m
        p_max = p
        res["bound_total"] = m + p_max * m * n / (1.0 - p_max)
        res["depth_bound"] = p_max * n / (1.0 - p_max)
        self._add_depth_stats(res, batch, m)
        res["n"] = n
        res["m"] = m
        return res

    # -- cycle grid ---------------------------------------------------------

    def cycle_results(self):
        if self._cycle is None:
            self._cycle = list(self._run_cycle_grid())
        return self._cycle

    def _run_cycle_grid(self):
        combo = 0
        for label, g in connected_graphs(self.max_n):
            if g.n < 2:
                continue
            for wmode in ("uniform", "hetero"):
                w = 1.0 if wmode == "uniform" else np.arange(1.0, g.m + 1.0)
                gw = g.with_values(w=w)
                r = 0
                summary = exact_cycle_summary(gw, r)
                batch = cycle_popping.batch_sample(
                    gw, r, derive_seed(self.seed, 2, combo),
                    self.samples, collect_keys=True, check=True)
                combo += 1
                res = self._common_results(f"cycle[{label},{wmode}]",
                                           summary, batch)
                wts = gw.w
                r_max = float(wts.max() / wts.min())
                res["bound_total"] = (g.n - 1) + 2.0 * r_max * g.m * g.n
                res["n"] = g.n
                res["m"] = g.m
                yield res

    # -- sink grid ----------------------------------------------------------

    def sink_results(self):
        if self._sink is None:
            self._sink = list(self._run_sink_grid())
        return self._sink

    def _run_sink_grid(self):
        for combo, (label, g) in enumerate(tree_free_connected_graphs(self.max_n)):
            summary = exact_sink_summary(g)
            batch = sink_popping.batch_sample(
                g, derive_seed(self.seed, 3, combo),
                self.samples, collect_keys=True, check=True)
            res = self._common_results(f"sink[{label}]", summary, batch)
            res["bound_total"] = g.m + g.n * (g.n - 1)
            res["n"] = g.n
            res["m"] = g.m
            yield res

    # -- shared machinery ----------------------------------------------------

    def _common_results(self, label, summary, batch):
        dist = summary.distribution
        try:
            tv = tv_distance(dist, batch["keys"])
            impossible = None
        except ValueError as exc:
            tv = float("inf")
            impossible = str(exc)
        null_tv = expected_empirical_tv(dist, self.samples)
        mean, stderr = _mean_stderr(batch["resampled"])
        return {
            "label": label,
            "support": dist.support_size,
            "tv": tv,
            "null_tv": null_tv,
            "tv_threshold": TV_BUDGET + null_tv,
            "impossible_outcome": impossible,
            "exact_expected": summary.expected_resampled,
            "empirical_mean": mean,
            "stderr": stderr,
            "init_draws": batch["init_draws"],
            "runs": batch["runs"],
        }

    def _add_depth_stats(self, res, batch, m):
        if m == 0:
            res["depth_max_mean"] = 0.0
            res["depth_max_stderr"] = 0.0
            return
        runs = batch["runs"]
        means = batch["per_var_sum"] / runs
        a = int(np.argmax(means))
        var = batch["per_var_sumsq"][a] / runs - means[a] ** 2
        res["depth_max_mean"] = float(means[a])
        res["depth_max_stderr"] = float(math.sqrt(max(var, 0.0) / runs))

    # -- identity grid -------------------------------------------------------

    def identity_results(self):
        if self._identity is None:
            rows = []
            for label, g in connected_graphs(self.max_n, p=0.5):
                d = bidirect(g)
                for p in P_GRID:
                    p_edges = np.full(g.m, p)
                    zrel = brute_force_Zrel(g, p_edges)
                    p_arcs = np.repeat(p_edges, 2)
                    for r in range(g.n):
                        zreach = brute_force_Zreach(d, r, p_arcs)
                        rel_err = abs(zreach - zrel) / zrel
                        rows.append({
                            "label": f"identity[{label},r={r},p={p}]",
                            "zrel": zrel,
                            "zreach": zreach,
                            "rel_err": rel_err,
                            "pass": rel_err <= 1e-12,
                        })
            self._identity = rows
        return self._identity


def _distribution_rows(ctx):
    rows = []
    for res in (ctx.cluster_results() + ctx.cycle_results()
                + ctx.sink_results()):
        rows.append({
            "label": res["label"],
            "support": res["support"],
            "tv": res["tv"],
            "null_tv": res["null_tv"],
            "threshold": res["tv_threshold"],
            "pass": (res["impossible_outcome"] is None
                     and res["tv"] <= res["tv_threshold"]),
        })
    return rows


def _expectation_rows(ctx):
    rows = []
    for res in (ctx.cluster_results() + ctx.cycle_results()
                + ctx.sink_results()):
        exact = res["exact_expected"]
        diff = abs(res["empirical_mean"] - exact)
        tol = STDERR_SIGMAS * res["stderr"]
        rows.append({
            "label": res["label"],
            "exact": exact,
            "empirical": res["empirical_mean"],
            "stderr": res["stderr"],
            "pass": diff <= max(tol, 1e-9),
            "hard_fail": diff > max(5.0 * res["stderr"], 1e-9),
        })
    return rows


def _bound_rows(ctx):
    rows = []
    for res in ctx.cluster_results():
        rows.append(_bound_row(res, res["init_draws"] + res["empirical_mean"],
                               res["bound_total"], res["stderr"], ":draws"))
        rows.append(_bound_row(res, res["depth_max_mean"], res["depth_bound"],
                               res["depth_max_stderr"], ":depth"))
    for res in ctx.cycle_results() + ctx.sink_results():
        rows.append(_bound_row(res, res["init_draws"] + res["empirical_mean"],
                               res["bound_total"], res["stderr"], ":draws"))
    return rows


def _bound_row(res, value, bound, stderr, tag):
    return {
        "label": res["label"] + tag,
        "mean": value,
        "bound": bound,
        "stderr": stderr,
        "pass": value <= bound + STDERR_SIGMAS * stderr,
        "hard_fail": value > bound + 5.0 * stderr + 1e-9,
    }


def run_suites(names, seed=1, samples=100_000, context=None):
    """Run the named suites on a shared context; returns {name: SuiteResult}."""
    ctx = context or VerificationContext(seed=seed, samples=samples)
    out = {}
    for name in names:
        statistical = False
        if name == "distributions":
            rows = _distribution_rows(ctx)
        elif name == "expectations":
            rows = _expectation_rows(ctx)
            statistical = True
        elif name == "identity":
            rows = ctx.identity_results()
        elif name == "bounds":
            rows = _bound_rows(ctx)
            statistical = True
        else:
            raise ValueError(f"unknown suite {name!r}")
        out[name] = SuiteResult(suite=name, rows=rows, statistical=statistical)
    return out

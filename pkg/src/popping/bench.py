"""Benchmark families reproducing the sharpened draw-count laws.

Each family emits one report row per instance size with the measured draw
statistics next to the relevant theorem bound, so tightness (ratio of mean
to bound) can be read off directly.

  lollipop-cluster   cluster-popping on bi-directed lollipops rooted at the
                     far path end; the clique dominates and the mean
                     resampled count approaches p*m*n/(1-p)
  lollipop-cycle     cycle-popping on weighted lollipops, same shape, mean
                     total draws approaching (n-1) + 2*r_max*m*n
  cycle-sink         sink-popping on cycles, where the m + n(n-1) bound is
                     met exactly (total draws = n^2)
  random-bound-sweep random connected instances checked against the bound
                     for one sampler kind
"""

import math

import numpy as np

from . import cluster_popping, cycle_popping, sink_popping
from .graph import UndirectedGraph, bidirect, cycle, is_connected, lollipop
from .tables import derive_seed

__all__ = ["lollipop_cluster_bench", "lollipop_cycle_bench",
           "cycle_sink_bench", "random_bound_sweep", "BENCH_FAMILIES"]


def _mean_stderr(values):
    values = np.asarray(values, dtype=np.float64)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(len(values))) \
        if len(values) > 1 else 0.0
    return mean, stderr


def lollipop_cluster_bench(n2_list=(6, 10), p=0.5, reps=3000, seed=1):
    """Rows for cluster-popping on lollipop(ceil(n2^1.5), n2), root = far end."""
    rows = []
    for i, n2 in enumerate(n2_list):
        n1 = math.ceil(n2 ** 1.5)
        g = lollipop(n1, n2, p=p)
        d = bidirect(g)
        n, m = d.n, d.m
        batch = cluster_popping.batch_sample(
            d, 0, derive_seed(seed, 10, i), reps, algorithm="tarjan")
        mean_res, stderr = _mean_stderr(batch["resampled"])
        denom = p * m * n / (1.0 - p)
        rows.append({
            "family": "lollipop-cluster",
            "n1": n1, "n2": n2, "n": n, "m": m, "p": p, "reps": reps,
            "mean_init": m,
            "mean_resampled": mean_res,
            "stderr_resampled": stderr,
            "mean_rounds": float(np.mean(batch["rounds"])),
            "bound": m + denom,
            "ratio": mean_res / denom,
        })
    return rows


def lollipop_cycle_bench(n2_list=(6, 10), w_clique=1.0, w_path=1.0,
                         reps=3000, seed=1):
    """Rows for cycle-popping on weighted lollipops, root = far path end."""
    if w_path > w_clique:
        raise ValueError("w_path must be <= w_clique")
    rows = []
    for i, n2 in enumerate(n2_list):
        n1 = math.ceil(n2 ** 1.5)
        g0 = lollipop(n1, n2)
        w = np.where(np.arange(g0.m) < n1, w_path, w_clique)
        g = g0.with_values(w=w)
        n, m = g.n, g.m
        r_max = w_clique / w_path
        batch = cycle_popping.batch_sample(
            g, 0, derive_seed(seed, 11, i), reps)
        mean_res, stderr = _mean_stderr(batch["resampled"])
        total = (n - 1) + mean_res
        denom = 2.0 * r_max * m * n
        rows.append({
            "family": "lollipop-cycle",
            "n1": n1, "n2": n2, "n": n, "m": m,
            "w_clique": w_clique, "w_path": w_path, "r_max": r_max,
            "reps": reps,
            "mean_init": n - 1,
            "mean_resampled": mean_res,
            "stderr_resampled": stderr,
            "mean_rounds": float(np.mean(batch["rounds"])),
            "bound": (n - 1) + denom,
            "mean_total": total,
            "ratio": total / denom,
        })
    return rows


def cycle_sink_bench(n_list=(10, 50), reps=10_000, seed=1):
    """Rows for sink-popping on cycles; mean total draws should equal n^2."""
    rows = []
    for i, n in enumerate(n_list):
        g = cycle(n)
        batch = sink_popping.batch_sample(g, derive_seed(seed, 12, i), reps)
        mean_res, stderr = _mean_stderr(batch["resampled"])
        total = g.m + mean_res
        rows.append({
            "family": "cycle-sink",
            "n": n, "m": g.m, "reps": reps,
            "mean_init": g.m,
            "mean_resampled": mean_res,
            "stderr_resampled": stderr,
            "mean_rounds": float(np.mean(batch["rounds"])),
            "bound": float(n * n),
            "mean_total": total,
            "ratio": total / (n * n),
        })
    return rows


def _random_connected_graph(rng, n, edge_prob=0.5):
    while True:
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < edge_prob]
        if not edges:
            continue
        g = UndirectedGraph(n, edges)
        if is_connected(g):
            return edges


def random_bound_sweep(kind, count=10, reps=2000, seed=1):
    """Random connected instances checked against the draw-count bound."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        n = int(rng.integers(4, 9))
        edges = _random_connected_graph(rng, n)
        if kind == "cluster":
            p = float(rng.uniform(0.2, 0.8))
            g = UndirectedGraph(n, edges, p=p)
            d = bidirect(g)
            batch = cluster_popping.batch_sample(
                d, 0, derive_seed(seed, 13, i), reps, algorithm="tarjan")
            mean_res, stderr = _mean_stderr(batch["resampled"])
            total = d.m + mean_res
            bound = d.m + p * d.m * d.n / (1.0 - p)
            desc = {"n": n, "m": d.m, "p": p}
        elif kind == "cycle":
            w = rng.uniform(1.0, 3.0, size=len(edges))
            g = UndirectedGraph(n, edges, w=w)
            batch = cycle_popping.batch_sample(
                g, 0, derive_seed(seed, 14, i), reps)
            mean_res, stderr = _mean_stderr(batch["resampled"])
            total = (n - 1) + mean_res
            r_max = float(w.max() / w.min())
            bound = (n - 1) + 2.0 * r_max * g.m * n
            desc = {"n": n, "m": g.m, "r_max": r_max}
        elif kind == "sink":
            g = UndirectedGraph(n, edges)
            if g.m < g.n:
                continue  # tree: no sink-free orientation
            batch = sink_popping.batch_sample(g, derive_seed(seed, 15, i), reps)
            mean_res, stderr = _mean_stderr(batch["resampled"])
            total = g.m + mean_res
            bound = g.m + n * (n - 1)
            desc = {"n": n, "m": g.m}
        else:
            raise ValueError(f"unknown kind {kind!r}")
        margin = 3.0 * stderr
        rows.append({
            "family": f"random-bound-sweep/{kind}",
            **desc,
            "reps": reps,
            "mean_resampled": mean_res,
            "stderr_resampled": stderr,
            "mean_total": total,
            "bound": bound,
            "pass": total <= bound + margin,
        })
    return rows


BENCH_FAMILIES = {
    "lollipop-cluster": lollipop_cluster_bench,
    "lollipop-cycle": lollipop_cycle_bench,
    "cycle-sink": cycle_sink_bench,
    "random-bound-sweep": random_bound_sweep,
}

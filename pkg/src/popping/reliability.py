"""All-terminal network reliability via annealing over root-connected subgraphs.

Z_rel(p) is the probability that a graph stays connected when each edge e
fails independently with probability p_e.  On the bi-directed version of
the graph this equals the probability that a random arc subset is
root-connected (any root), which is what cluster-popping samples from; the
equality is verified exactly by the brute-force identity test in the test
suite, and gates this whole construction.

The estimator interpolates between the target measure (beta = 0) and a
forced-arborescence endpoint (beta = infinity) by tilting only the n-1
arborescence arcs: at inverse temperature beta, tree arc a fails with
p'_a where p'_a/(1-p'_a) = exp(-beta) p_a/(1-p_a).  With the Hamiltonian
H(R) = #(tree arcs missing from R), stage ratios
Z(beta_{i+1})/Z(beta_i) = E[exp(-dbeta H)] telescope into
Z(0) = Z_reach / prod_{a in tree}(1 - p_a), and Z(infinity) = 1.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DrawBudgetExceeded, InfeasibleInstanceError, InvalidGraphError
from .graph import arborescence_toward_root, bidirect, is_connected
from .prs import DEFAULT_MAX_DRAWS
from .tables import derive_seed, derive_seeds

__all__ = [
    "modified_prob", "GibbsInstance", "AnnealSchedule", "rho_beta_sample",
    "estimate_reliability", "ReliabilityEstimate",
    "brute_force_Zrel", "brute_force_Zreach",
]

_CHUNK_BITS = 18


def modified_prob(p, beta):
    """Failure probability after tilting the odds by exp(-beta).

    Solves p'/(1-p') = p exp(-beta)/(1-p); nonincreasing in beta, equal to p
    at beta = 0 and to 0 at beta = infinity.
    """
    p = np.asarray(p, dtype=np.float64)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise InvalidGraphError("p must lie strictly inside (0, 1)")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if math.isinf(beta):
        out = np.zeros_like(p)
    else:
        t = p * math.exp(-beta)
        out = t / (1.0 - p + t)
    return float(out) if out.ndim == 0 else out


@dataclass
class GibbsInstance:
    """A rooted bi-directed graph with a tilted arborescence.

    H(R) = number of arborescence arcs missing from R, an integer in
    [0, n-1]; H(R) = 0 iff the arborescence is contained in R.
    """

    d: "DirectedGraph"
    r: int
    tree: np.ndarray  # bool mask over arcs, exactly n-1 set

    def __post_init__(self):
        if int(self.tree.sum()) != self.d.n - 1:
            raise InvalidGraphError("arborescence must have n-1 arcs")
        self.tree_arcs = np.nonzero(self.tree)[0].astype(np.int64)

    @property
    def max_hamiltonian(self):
        return self.d.n - 1

    def tilted_p(self, beta):
        """Arc probabilities with only the arborescence arcs tilted."""
        p = np.array(self.d.p, dtype=np.float64)
        p[self.tree_arcs] = modified_prob(p[self.tree_arcs], beta) \
            if not math.isinf(beta) else 0.0
        return p

    def hamiltonian(self, subset):
        return int(np.count_nonzero(~np.asarray(subset, dtype=bool)[self.tree_arcs]))


def rho_beta_sample(gi, beta, table, max_draws=DEFAULT_MAX_DRAWS):
    """One draw from the tilted Gibbs distribution rho_beta over
    root-connected subgraphs: rho_beta(R) proportional to
    exp(-beta H(R)) * F(R)."""
    from .cluster_popping import sample_tarjan
    return sample_tarjan(gi.d, gi.r, table, p_override=gi.tilted_p(beta),
                         max_draws=max_draws)


@dataclass
class AnnealSchedule:
    """Uniform inverse-temperature ladder plus the terminal stage.

    betas[0] = 0; step dbeta = 1/(n-1); betas[-1] >= beta_cold where
    beta_cold is large enough that Pr[H = 0] >= 1/2 (union bound over the
    n-1 tree arcs).  samples_per_stage applies to every ratio stage and to
    the terminal H = 0 stage.
    """

    betas: np.ndarray
    samples_per_stage: int
    dbeta: float

    @property
    def stages(self):
        return len(self.betas) - 1

    @classmethod
    def build(cls, n, p_max, epsilon, c=8):
        if n < 2:
            raise ValueError("schedule needs n >= 2")
        if not (0 < epsilon < 1):
            raise ValueError("epsilon must lie in (0, 1)")
        beta_cold = max(0.0, math.log(2 * (n - 1) * p_max / (1.0 - p_max))) \
            + math.log(4.0)
        k = math.ceil(beta_cold * (n - 1))
        dbeta = 1.0 / (n - 1)
        betas = np.arange(k + 1, dtype=np.float64) * dbeta
        samples = math.ceil(c * k / epsilon ** 2)
        return cls(betas=betas, samples_per_stage=samples, dbeta=dbeta)


@dataclass
class ReliabilityEstimate:
    """Point estimate with per-stage diagnostics."""

    estimate: float
    epsilon: float
    seed: int
    stages: list = field(default_factory=list)  # (beta, ratio, samples)
    total_samples: int = 0
    total_draws: int = 0
    repetitions: int = 1

    def to_report(self):
        return {
            "estimate": self.estimate,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "total_samples": self.total_samples,
            "total_draws": self.total_draws,
            "repetitions": self.repetitions,
            "stages": [{"beta": b, "ratio": r, "samples": s}
                       for b, r, s in self.stages],
        }


def _single_estimate(gi, schedule, seed, max_draws):
    d, r = gi.d, gi.r
    out_start, out_arc = d.out_csr()
    head = np.ascontiguousarray(d.head)
    tail = np.ascontiguousarray(d.tail)
    k = schedule.stages
    s = schedule.samples_per_stage
    stages = []
    log_ratio_prod = 0.0
    total_draws = 0
    for i in range(k + 1):
        beta = float(schedule.betas[i])
        p_tilted = gi.tilted_p(beta)
        seeds = derive_seeds(seed, s, i)
        status, H, draws = _kernels.cluster_batch_hamiltonian(
            d.n, d.m, out_start, out_arc, head, tail, p_tilted, r,
            gi.tree_arcs, seeds, max_draws)
        if status == _kernels.BUDGET_EXCEEDED:
            raise DrawBudgetExceeded(max_draws)
        total_draws += int(draws)
        if i < k:
            ratio = float(np.exp(-schedule.dbeta * H).mean())
        else:
            ratio = float((H == 0).mean())
        if ratio <= 0.0:
            raise ArithmeticError(
                f"stage {i} ratio estimate is zero; increase samples")
        stages.append((beta, ratio, s))
        log_ratio_prod += math.log(ratio)
    tree_weight = float(np.log1p(-gi.d.p[gi.tree_arcs]).sum())
    estimate = math.exp(tree_weight - log_ratio_prod)
    return estimate, stages, (k + 1) * s, total_draws


def estimate_reliability(g, epsilon, seed=1, root=None, confidence=None,
                         c=8, max_draws=DEFAULT_MAX_DRAWS):
    """Estimate Z_rel(p) within relative error epsilon (probability >= 3/4).

    Telescoping product over the schedule: Zhat = prod_{a in tree}(1-p_a) /
    (prod_i Rhat_i * Phat_0), with Rhat_i the stage-i mean of exp(-dbeta H)
    and Phat_0 the terminal frequency of H = 0.  With a confidence level
    given, the median of 5 independent repetitions is returned.
    """
    if not (0 < epsilon < 1):
        raise InvalidGraphError("epsilon must lie in (0, 1)")
    if g.p is None:
        raise InvalidGraphError("reliability needs per-edge failure probabilities")
    if not is_connected(g):
        raise InfeasibleInstanceError("graph is disconnected; Z_rel = 0")
    if g.n == 1:
        return ReliabilityEstimate(estimate=1.0, epsilon=epsilon, seed=seed)
    r = root if root is not None else (g.root if g.root is not None else 0)
    d = bidirect(g)
    tree = arborescence_toward_root(d, r)
    gi = GibbsInstance(d=d, r=r, tree=tree)
    p_max = float(g.p.max())
    schedule = AnnealSchedule.build(g.n, p_max, epsilon, c=c)
    # q = log of the telescoped ratio is at most (n-1) log(1/(1-p_max))
    q_bound = (g.n - 1) * math.log(1.0 / (1.0 - p_max))
    assert -float(np.log1p(-g.p[np.nonzero(tree)[0] // 2]).sum()) <= q_bound + 1e-9
    reps = 5 if confidence is not None else 1
    estimates = []
    all_stages = None
    total_samples = 0
    total_draws = 0
    for rep in range(reps):
        est, stages, ns, nd = _single_estimate(
            gi, schedule, derive_seed(seed, rep) if reps > 1 else seed,
            max_draws)
        estimates.append(est)
        total_samples += ns
        total_draws += nd
        if all_stages is None:
            all_stages = stages
    final = float(np.median(estimates))
    return ReliabilityEstimate(estimate=final, epsilon=epsilon, seed=seed,
                               stages=all_stages, total_samples=total_samples,
                               total_draws=total_draws, repetitions=reps)


# ---------------------------------------------------------------------------
# Exact references by exhaustive enumeration
# ---------------------------------------------------------------------------


def _subset_weights(idx, values_present, values_absent):
    w = np.ones(idx.shape[0], dtype=np.float64)
    for a, (vp, va) in enumerate(zip(values_present, values_absent)):
        present = ((idx >> np.uint64(a)) & np.uint64(1)).astype(bool)
        w *= np.where(present, vp, va)
    return w


def brute_force_Zrel(g, p=None):
    """Exact all-terminal reliability by enumerating all edge subsets.

    Connectivity per subset via a vectorized reach-from-vertex-0 fixpoint;
    chunked so the m <= 24 guard stays within memory.
    """
    p = g.p if p is None else np.asarray(p, dtype=np.float64)
    if p.ndim == 0:
        p = np.full(g.m, float(p))
    if g.m > 24:
        raise InvalidGraphError("enumeration guard: m <= 24 edges")
    size = 1 << g.m
    chunk = 1 << min(_CHUNK_BITS, g.m)
    totals = []
    for base in range(0, size, chunk):
        idx = np.arange(base, base + chunk, dtype=np.uint64)
        present = [((idx >> np.uint64(e)) & np.uint64(1)).astype(bool)
                   for e in range(g.m)]
        reach = np.zeros((g.n, idx.shape[0]), dtype=bool)
        reach[0] = True
        for _ in range(g.n):
            for e, (u, v) in enumerate(g.edges):
                np.logical_or(reach[v], reach[u] & present[e], out=reach[v])
                np.logical_or(reach[u], reach[v] & present[e], out=reach[u])
        connected = reach.all(axis=0)
        wt = _subset_weights(idx, 1.0 - p, p)
        totals.append(float(wt[connected].sum()))
    return math.fsum(totals)


def brute_force_Zreach(d, r, p=None):
    """Exact probability that a random arc subset is root-connected to r."""
    p = d.p if p is None else np.asarray(p, dtype=np.float64)
    if p.ndim == 0:
        p = np.full(d.m, float(p))
    if d.m > 24:
        raise InvalidGraphError("enumeration guard: m <= 24 arcs")
    size = 1 << d.m
    chunk = 1 << min(_CHUNK_BITS, d.m)
    tails = d.tail
    heads = d.head
    totals = []
    for base in range(0, size, chunk):
        idx = np.arange(base, base + chunk, dtype=np.uint64)
        present = [((idx >> np.uint64(a)) & np.uint64(1)).astype(bool)
                   for a in range(d.m)]
        reach = np.zeros((d.n, idx.shape[0]), dtype=bool)
        reach[r] = True
        for _ in range(d.n):
            for a in range(d.m):
                np.logical_or(reach[tails[a]],
                              reach[heads[a]] & present[a],
                              out=reach[tails[a]])
        connected = reach.all(axis=0)
        wt = _subset_weights(idx, 1.0 - p, p)
        totals.append(float(wt[connected].sum()))
    return math.fsum(totals)

"""Per-timestamp orchestration, ablation variants, baseline, and experiments."""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .community import (DEFAULT_GROUP_SIZE, CommunityDecision, CommunityPartition,
                        DecisionKind, determine)
from .dp import NoiseSource, PrivacySpend, WindowAccountant, ZeroNoise, laplace_perturb
from .graph import DISTINCT, GraphStream, Snapshot, WindowRule, load_stream, serialize_stream
from .metrics import METRICS, MetricsReport, evaluate
from .perturbation import PerturbedProfile, extract, fuse, perturb
from .reconstruction import SyntheticSnapshot, reconstruct

log = logging.getLogger(__name__)

EDGE_BUDGET_CAP = 0.01
CSV_COLUMNS = ["run", "seed", "timestamp", "variant", "epsilon", "window", "metric", "value"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BudgetPlan:
    eps_total: float
    window: int
    eps_s: float
    eps_e: float
    eps_r: float
    eps_c: float
    eps_i: float
    eps_i1: float
    eps_i2: float


def plan_budget(eps_total: float, w: int, repartitioning: bool,
                eps_e_cap: float = EDGE_BUDGET_CAP) -> BudgetPlan:
    """Split the per-timestamp share ``eps_total / w``.

    The edge-count query gets at most ``eps_e_cap``. Of the rest, a
    partitioning timestamp gives half to community division; a reusing one
    gives everything to information perturbation.
    """
    if not eps_total > 0:
        raise ConfigError(f"epsilon must be positive, got {eps_total}")
    if w < 1:
        raise ConfigError(f"window must be >= 1, got {w}")
    if not eps_e_cap > 0:
        raise ConfigError("edge budget cap must be positive")
    eps_s = eps_total / w
    eps_e = min(eps_e_cap, 0.5 * eps_s)
    eps_r = eps_s - eps_e
    eps_c = 0.5 * eps_r if repartitioning else 0.0
    eps_i = eps_r - eps_c
    eps_i1 = 0.5 * eps_i
    return BudgetPlan(eps_total, w, eps_s, eps_e, eps_r, eps_c, eps_i, eps_i1, eps_i - eps_i1)


@dataclass(frozen=True)
class Variant:
    name: str
    adaptive: bool = True
    fusion: bool = True
    post_process: bool = True
    baseline: bool = False


VARIANTS = {v.name: v for v in [
    Variant("psgraph"),
    Variant("r1", adaptive=False),
    Variant("ablation1", fusion=False, post_process=False),
    Variant("ablation2", post_process=False),
    Variant("ablation3", fusion=False),
    Variant("ablation4"),
    Variant("random-edges", baseline=True),
]}


@dataclass(frozen=True)
class RunConfig:
    input: str | None = None
    format: str = "temporal"
    epsilon: float = 1.0
    window: int = 5
    threshold_mult: float = 1.0
    repeats: int = 10
    seed: int = 0
    variant: str = "psgraph"
    metrics: tuple[str, ...] = METRICS
    out: str | None = None
    emit_graphs: str | None = None
    noiseless: bool = False
    group_size: int = DEFAULT_GROUP_SIZE
    eps_e_cap: float = EDGE_BUDGET_CAP
    bucket_width: int | None = None
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if self.threshold_mult < 0:
            raise ConfigError("threshold multiplier must be non-negative")
        if self.group_size < 1:
            raise ConfigError("group size must be >= 1")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; choose from {sorted(VARIANTS)}")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad or not self.metrics:
            raise ConfigError(f"unknown metrics {bad}; choose from {list(METRICS)}")
        if self.format not in ("temporal", "snapshots"):
            raise ConfigError(f"unknown format {self.format!r}")

    def noise_source(self, seed: int) -> NoiseSource:
        return ZeroNoise(seed) if self.noiseless else NoiseSource(seed)


@dataclass
class PipelineState:
    partition: CommunityPartition | None = None
    m_pert: float | None = None
    profile: PerturbedProfile | None = None


@dataclass
class SynthesisResult:
    stream: GraphStream
    accountant: WindowAccountant
    decisions: list[CommunityDecision] = field(default_factory=list)
    plans: list[BudgetPlan] = field(default_factory=list)


def synthesize_step(s: Snapshot, state: PipelineState, cfg: RunConfig, variant: Variant,
                    ns: NoiseSource, seed: int | None = None):
    t = s.timestamp
    partition_plan = plan_budget(cfg.epsilon, cfg.window, True, cfg.eps_e_cap)
    m_pert = laplace_perturb(float(len(s.edges)), partition_plan.eps_e, 1.0, ns)
    decision = determine(t, m_pert, state.m_pert, s, state.partition,
                         cfg.threshold_mult * s.num_nodes, partition_plan.eps_c, ns,
                         group_size=cfg.group_size, force_repartition=not variant.adaptive)
    plan = partition_plan if not decision.reused else plan_budget(
        cfg.epsilon, cfg.window, False, cfg.eps_e_cap)

    profile, pairs = extract(s, decision.partition)
    noisy = perturb(profile, pairs, plan.eps_i, plan.eps_i1, ns, m_pert)
    fused = fuse(noisy, state.profile, decision.reused and variant.fusion)
    edges = reconstruct(decision.partition, fused.d_in_hat, fused.d_out_hat, fused.v_hat,
                        m_pert, ns, post=variant.post_process)

    spend = PrivacySpend(t, {"edge_count": plan.eps_e, "community": decision.eps_c_spent,
                             "information": plan.eps_i})
    new_state = PipelineState(decision.partition, m_pert, fused)
    syn = SyntheticSnapshot(t, s.num_nodes, edges, seed=seed, variant=variant.name)
    return syn, new_state, decision, plan, spend


def synthesize_stream(stream: GraphStream, cfg: RunConfig, ns: NoiseSource,
                      seed: int | None = None) -> SynthesisResult:
    """Run the full private pipeline over every snapshot, in order."""
    variant = VARIANTS[cfg.variant]
    if variant.baseline:
        return random_edges_baseline(stream, cfg, ns, seed)
    acct = WindowAccountant(cfg.window, cfg.epsilon)
    state = PipelineState()
    out, decisions, plans = [], [], []
    for s in stream:
        syn, state, decision, plan, spend = synthesize_step(s, state, cfg, variant, ns, seed)
        acct.record(spend)
        out.append(syn)
        decisions.append(decision)
        plans.append(plan)
        log.debug("t=%d %s delta_e=%.1f m=%d", s.timestamp, decision.kind.value,
                  decision.delta_e, len(syn.edges))
    return SynthesisResult(GraphStream(tuple(out)), acct, decisions, plans)


def _random_pairs(n: int, k: int, ns: NoiseSource) -> np.ndarray:
    total = n * (n - 1) // 2
    k = min(k, total)
    if k <= 0:
        return np.empty((0, 2), dtype=np.int64)
    if total <= 2_000_000 or k > total // 2:
        i, j = np.triu_indices(n, 1)
        pick = ns.choice(total, size=k, replace=False)
        return np.stack([i[pick], j[pick]], axis=1)
    found: set[tuple[int, int]] = set()
    while len(found) < k:
        draw = ns.integers(n, (2 * (k - len(found)), 2))
        for u, v in draw:
            if u != v:
                found.add((min(u, v), max(u, v)))
                if len(found) == k:
                    break
    return np.array(sorted(found), dtype=np.int64)


def random_edges_baseline(stream: GraphStream, cfg: RunConfig, ns: NoiseSource,
                          seed: int | None = None) -> SynthesisResult:
    """Uniformly random edges matching a noisy edge count (whole share per step)."""
    acct = WindowAccountant(cfg.window, cfg.epsilon)
    eps_s = cfg.epsilon / cfg.window
    out = []
    for s in stream:
        m_pert = laplace_perturb(float(len(s.edges)), eps_s, 1.0, ns)
        edges = _random_pairs(s.num_nodes, max(int(np.round(m_pert)), 0), ns)
        acct.record(PrivacySpend(s.timestamp, {"edge_count": eps_s}))
        out.append(SyntheticSnapshot(s.timestamp, s.num_nodes, edges, seed=seed,
                                     variant="random-edges"))
    return SynthesisResult(GraphStream(tuple(out)), acct)


# ---------------------------------------------------------------------------
# experiments

def _one_run(args):
    cfg, stream, run = args
    seed = cfg.seed + run
    result = synthesize_stream(stream, cfg, cfg.noise_source(seed), seed)
    values = []
    for orig, syn in zip(stream, result.stream):
        values.extend(evaluate(orig, syn, cfg.metrics))
    return run, seed, values, result.stream


def _load(cfg: RunConfig) -> GraphStream:
    if cfg.input is None:
        raise ConfigError("no input path given")
    rule = WindowRule(cfg.bucket_width) if cfg.bucket_width else DISTINCT
    return load_stream(cfg.input, cfg.format, rule)


def run_experiment(cfg: RunConfig, stream: GraphStream | None = None) -> MetricsReport:
    """``cfg.repeats`` seeded runs (seed, seed+1, ...) with metrics per timestamp."""
    if stream is None:
        stream = _load(cfg)
    tasks = [(cfg, stream, r) for r in range(cfg.repeats)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_one_run, tasks))
    else:
        results = [_one_run(t) for t in tasks]
    report = MetricsReport()
    for run, seed, values, syn in results:
        report.add(run, seed, values)
        if cfg.emit_graphs:
            os.makedirs(cfg.emit_graphs, exist_ok=True)
            path = os.path.join(cfg.emit_graphs, f"{cfg.variant}_run{run}_seed{seed}.txt")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(serialize_stream(syn))
    if cfg.out:
        write_csv(report, cfg, cfg.out)
    return report


def report_csv(report: MetricsReport, cfg: RunConfig) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for run, seed, mv in report.records:
        writer.writerow([run, seed, mv.timestamp, cfg.variant, repr(cfg.epsilon), cfg.window,
                         mv.name, repr(float(mv.value))])
    for name, (mean, std) in report.aggregate().items():
        for suffix, value in (("_mean", mean), ("_std", std)):
            writer.writerow([-1, cfg.seed, -1, cfg.variant, repr(cfg.epsilon), cfg.window,
                             name + suffix, repr(float(value))])
    return buf.getvalue()


def write_csv(report: MetricsReport, cfg: RunConfig, path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report_csv(report, cfg))

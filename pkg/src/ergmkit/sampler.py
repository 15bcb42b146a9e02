"""Metropolis-Hastings simulation of networks at fixed coefficients.

One chain proposes a uniformly random dyad per step and toggles it with
probability ``min(1, exp(s * theta . delta))`` where ``delta`` is the dyad's
0 -> 1 change-statistic vector and ``s`` is +1 when the edge is currently
absent, -1 when present. Statistics are maintained incrementally, so a step
never rescans the graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import NodeAttributes, UndirectedGraph
from .stats import ModelSpec, change_from_compiled, compile_terms, global_stats

__all__ = ["SamplerConfig", "SampleResult", "ChainState", "sample", "stream_rng", "derive_seed"]

_BATCH = 8192


def stream_rng(*key) -> np.random.Generator:
    """Independent, reproducible generator for an integer key path.

    Distinct key tuples give statistically independent streams, so chains,
    bootstrap replicates and study replicates can each derive their own
    stream from (master_seed, tag, index...).
    """
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


def derive_seed(*key) -> int:
    """Deterministic child seed for nested components that take a plain integer."""
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1)[0])


@dataclass
class SamplerConfig:
    """Chain schedule: burn-in steps, steps between retained draws, draw count."""

    burn_in: int = 300_000
    interval: int = 30_000
    num_samples: int = 1
    seed: int | None = None
    retain_graphs: bool = False

    def __post_init__(self):
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.interval < 1:
            raise ValueError(f"interval must be >= 1, got {self.interval}")
        if self.num_samples < 1:
            raise ValueError(f"num_samples must be >= 1, got {self.num_samples}")


@dataclass
class SampleResult:
    """Retained draws: one statistics row (and optionally one graph) per sample."""

    stats: np.ndarray  # (num_samples, q)
    densities: np.ndarray  # (num_samples,)
    graphs: list[UndirectedGraph] | None
    accepted: int
    proposed: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0


class ChainState:
    """One MH chain: graph, cached statistics, RNG and accept/propose counters.

    The cached statistic vector always equals ``global_stats`` of the current
    graph; it is updated by +/- the change statistics on every accepted step.
    """

    __slots__ = (
        "graph",
        "theta",
        "comp",
        "stats",
        "rng",
        "accepted",
        "proposed",
        "_bi",
        "_bj",
        "_bu",
        "_ptr",
    )

    def __init__(
        self,
        graph: UndirectedGraph,
        spec: ModelSpec,
        attrs: NodeAttributes | None,
        rng: np.random.Generator,
    ):
        self.graph = graph
        self.theta = spec.theta.tolist()
        self.comp = compile_terms(spec, attrs)
        self.stats = global_stats(graph, attrs, spec).tolist()
        self.rng = rng
        self.accepted = 0
        self.proposed = 0
        self._ptr = _BATCH
        self._bi: list[int] = []
        self._bj: list[int] = []
        self._bu: list[float] = []

    def _refill(self) -> None:
        n = self.graph.n
        self._bi = self.rng.integers(0, n, _BATCH).tolist()
        self._bj = self.rng.integers(0, n - 1, _BATCH).tolist()
        self._bu = self.rng.random(_BATCH).tolist()
        self._ptr = 0

    def current_stats(self) -> np.ndarray:
        return np.array(self.stats)

    def step(self) -> bool:
        """One proposal; returns True when the toggle was accepted."""
        p = self._ptr
        if p >= _BATCH:
            self._refill()
            p = 0
        i = self._bi[p]
        j = self._bj[p]
        u = self._bu[p]
        self._ptr = p + 1
        if j >= i:
            j += 1
        self.proposed += 1

        g = self.graph
        delta = change_from_compiled(g, self.comp, i, j)
        lp = 0.0
        theta = self.theta
        for t in range(len(theta)):
            lp += theta[t] * delta[t]
        adding = j not in g._adj[i]
        if not adding:
            lp = -lp
        if lp < 0.0 and u >= math.exp(lp):
            return False

        g.toggle(i, j)
        stats = self.stats
        if adding:
            for t in range(len(stats)):
                stats[t] += delta[t]
        else:
            for t in range(len(stats)):
                stats[t] -= delta[t]
        self.accepted += 1
        return True

    def run(self, steps: int) -> None:
        if self.graph.n < 2:
            return
        for _ in range(steps):
            self.step()


def sample(
    g0: UndirectedGraph,
    spec: ModelSpec,
    attrs: NodeAttributes | None,
    cfg: SamplerConfig,
    *,
    rng: np.random.Generator | None = None,
) -> SampleResult:
    """Run burn-in, then retain one statistics row every ``interval`` steps.

    The starting graph is copied, never mutated. Pass ``rng`` to draw from a
    derived stream; otherwise the config seed initializes a fresh generator.
    """
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    chain = ChainState(g0.copy(), spec, attrs, rng)
    chain.run(cfg.burn_in)
    q = spec.q
    rows = np.empty((cfg.num_samples, q))
    densities = np.empty(cfg.num_samples)
    graphs: list[UndirectedGraph] | None = [] if cfg.retain_graphs else None
    for s in range(cfg.num_samples):
        chain.run(cfg.interval)
        rows[s] = chain.stats
        densities[s] = chain.graph.density
        if graphs is not None:
            graphs.append(chain.graph.copy())
    return SampleResult(rows, densities, graphs, chain.accepted, chain.proposed)

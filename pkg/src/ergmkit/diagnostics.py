"""Degeneracy and goodness-of-fit checks on simulated statistic samples.

Simulated statistics are centered on the observed network's values; a healthy
fit scatters each centered series around zero. Automated flags approximate
the usual visual checks: a mean simulated density far below or above the
observed one (or almost all draws empty/complete) marks degeneracy, and a
centered mean further than a few autocorrelation-adjusted standard errors
from zero marks an off-center statistic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["TermGof", "GofReport", "gof", "emit_plots", "lag1_autocorr"]


def lag1_autocorr(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.size < 3:
        return 0.0
    a = x[:-1] - x[:-1].mean()
    b = x[1:] - x[1:].mean()
    denom = np.sqrt((a @ a) * (b @ b))
    if denom == 0.0:
        return 0.0
    return float((a @ b) / denom)


@dataclass
class TermGof:
    name: str
    observed: float
    mean: float  # raw simulated mean
    sd: float
    z: float  # (observed - simulated mean) / sd
    lag1: float
    off_center: bool

    @property
    def centered_mean(self) -> float:
        return self.mean - self.observed


@dataclass
class GofReport:
    terms: list[TermGof]
    centered: np.ndarray  # (L, q) simulated minus observed
    degenerate_empty: bool
    degenerate_full: bool
    mean_density: float
    observed_density: float
    num_samples: int

    @property
    def flagged(self) -> bool:
        return self.degenerate_empty or self.degenerate_full or any(
            t.off_center for t in self.terms
        )

    def to_dict(self) -> dict:
        return {
            "degenerate_empty": self.degenerate_empty,
            "degenerate_full": self.degenerate_full,
            "mean_density": self.mean_density,
            "observed_density": self.observed_density,
            "num_samples": self.num_samples,
            "terms": [
                {
                    "name": t.name,
                    "observed": t.observed,
                    "mean": t.mean,
                    "sd": t.sd,
                    "z": t.z,
                    "lag1_autocorr": t.lag1,
                    "off_center": t.off_center,
                }
                for t in self.terms
            ],
        }


def gof(
    sample_stats: np.ndarray,
    obs_stats,
    sample_densities,
    observed_density: float,
    term_names=None,
    *,
    density_ratio: float = 100.0,
    full_ceiling: float = 0.99,
    extreme_fraction: float = 0.99,
    center_z: float = 2.0,
) -> GofReport:
    """Centered summaries plus degeneracy/off-center flags for one sample.

    ``density_ratio`` controls the degeneracy band: a mean simulated density
    below observed/ratio flags empty-side degeneracy, above ratio x observed
    full-side. The full threshold is capped at ``full_ceiling`` (just under
    certainty, so collapse toward the complete graph stays detectable even
    when ratio x observed exceeds 1) and only fires when the mean is at least
    twice the observed density, which keeps honestly dense models unflagged.
    A fraction >= ``extreme_fraction`` of exactly empty or exactly complete
    draws flags the same side regardless of the ratio.
    """
    S = np.atleast_2d(np.asarray(sample_stats, dtype=np.float64))
    obs = np.asarray(obs_stats, dtype=np.float64)
    dens = np.asarray(sample_densities, dtype=np.float64)
    L, q = S.shape
    if L < 10:
        raise ValueError(f"need at least 10 sampled rows, got {L}")
    if obs.shape != (q,):
        raise ValueError(f"observed statistics have shape {obs.shape}, expected ({q},)")
    if term_names is None:
        term_names = [f"stat_{t}" for t in range(q)]

    centered = S - obs
    terms = []
    for t in range(q):
        col = S[:, t]
        mean = float(col.mean())
        sd = float(col.std(ddof=1))
        rho = lag1_autocorr(col)
        rho = min(max(rho, -0.999), 0.999)
        l_eff = max(L * (1.0 - rho) / (1.0 + rho), 1.0)
        c_mean = mean - obs[t]
        threshold = center_z * sd / np.sqrt(l_eff)
        terms.append(
            TermGof(
                name=term_names[t],
                observed=float(obs[t]),
                mean=mean,
                sd=sd,
                z=float((obs[t] - mean) / sd) if sd > 0 else 0.0,
                lag1=rho,
                off_center=bool(abs(c_mean) > threshold),
            )
        )

    mean_density = float(dens.mean())
    frac_empty = float((dens == 0.0).mean())
    frac_full = float((dens == 1.0).mean())
    degenerate_empty = (
        mean_density < observed_density / density_ratio or frac_empty >= extreme_fraction
    )
    degenerate_full = (
        mean_density > min(density_ratio * observed_density, full_ceiling)
        and mean_density > 2.0 * observed_density
    ) or frac_full >= extreme_fraction
    return GofReport(
        terms=terms,
        centered=centered,
        degenerate_empty=bool(degenerate_empty),
        degenerate_full=bool(degenerate_full),
        mean_density=mean_density,
        observed_density=float(observed_density),
        num_samples=L,
    )


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_").lower()


def _bin_edges(x: np.ndarray) -> np.ndarray:
    # Freedman-Diaconis width, never fewer than 10 bins
    if np.ptp(x) == 0.0:
        c = float(x[0])
        return np.linspace(c - 0.5, c + 0.5, 11)
    edges = np.histogram_bin_edges(x, bins="fd")
    if edges.shape[0] < 11:
        edges = np.histogram_bin_edges(x, bins=10)
    return edges

def emit_plots(report: GofReport, out_dir, *, svg: bool = False) -> list[Path]:
    """Write per-term trace and histogram CSVs, plus an optional SVG panel.

    The SVG marks the observed value (centered zero) with a thick reference
    line in both the trace and the histogram column.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    histograms = []
    for t, term in enumerate(report.terms):
        col = report.centered[:, t]
        slug = _slug(term.name)
        trace_path = out / f"trace_{slug}.csv"
        with open(trace_path, "w") as fh:
            fh.write("draw,centered\n")
            for d, v in enumerate(col.tolist()):
                fh.write(f"{d},{v!r}\n")
        written.append(trace_path)

        edges = _bin_edges(col)
        counts, edges = np.histogram(col, bins=edges)
        histograms.append((edges, counts))
        density_path = out / f"density_{slug}.csv"
        with open(density_path, "w") as fh:
            fh.write("bin_left,bin_right,count\n")
            for k in range(counts.shape[0]):
                fh.write(f"{float(edges[k])!r},{float(edges[k + 1])!r},{int(counts[k])}\n")
        written.append(density_path)

    if svg:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        plt.rcParams["svg.hashsalt"] = "ergmkit"
        q = len(report.terms)
        fig, axes = plt.subplots(q, 2, figsize=(9, 2.4 * q), squeeze=False)
        for t, term in enumerate(report.terms):
            col = report.centered[:, t]
            ax = axes[t][0]
            ax.plot(np.arange(col.shape[0]), col, lw=0.6, color="#1f77b4")
            ax.axhline(0.0, color="black", lw=2.0)
            ax.set_ylabel(term.name, fontsize=8)
            edges, counts = histograms[t]
            ax2 = axes[t][1]
            ax2.stairs(counts, edges, fill=True, color="#9ecae1")
            ax2.axvline(0.0, color="black", lw=2.0)
        axes[0][0].set_title("centered trace")
        axes[0][1].set_title("centered density")
        fig.tight_layout()
        svg_path = out / "gof.svg"
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(svg_path)
    return written

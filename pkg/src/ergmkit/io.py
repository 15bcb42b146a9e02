"""File formats: edge-list and attribute CSVs, model configs, statistics
tables, fit documents and run manifests.

All numeric CSV cells are written with ``repr``, which round-trips float64
exactly, and JSON documents are dumped with sorted keys so identical runs
produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .graph import NodeAttributes, UndirectedGraph
from .mple import FitResult
from .stats import ModelSpec

__all__ = [
    "read_edge_csv",
    "write_edge_csv",
    "read_attr_csv",
    "write_attr_csv",
    "read_model_config",
    "write_model_config",
    "read_stats_csv",
    "write_stats_csv",
    "write_fit_json",
    "read_fit_json",
    "write_manifest",
    "read_manifest",
]


def _open_rows(path) -> list[list[str]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"file not found: {path}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
    if not rows:
        raise InputError(f"empty CSV: {path}")
    return rows


def read_edge_csv(path, n: int | None = None) -> tuple[UndirectedGraph, dict[str, int] | None]:
    """Load ``source,target`` rows into a graph.

    Node labels may be arbitrary strings; when they are not already the dense
    integers 0..n-1 they are mapped (sorted label order) and the mapping is
    returned so outputs can translate back. ``n`` overrides the inferred node
    count for graphs with isolated trailing nodes.
    """
    rows = _open_rows(path)
    header, body = rows[0], rows[1:]
    if [h.strip().lower() for h in header[:2]] != ["source", "target"]:
        raise InputError(f"{path}: expected header 'source,target', got {','.join(header)}")
    raw_pairs = []
    for ln, row in enumerate(body, start=2):
        if len(row) < 2:
            raise InputError(f"{path}:{ln}: expected two columns")
        raw_pairs.append((row[0].strip(), row[1].strip()))

    labels = sorted({x for pair in raw_pairs for x in pair}, key=_label_key)
    mapping: dict[str, int] | None
    if labels and all(_is_int(x) and int(x) >= 0 for x in labels):
        # integer ids are taken literally; gaps are isolated nodes
        mapping = None
        count = n if n is not None else max(int(x) for x in labels) + 1
        pairs = [(int(a), int(b)) for a, b in raw_pairs]
    else:
        mapping = {lab: k for k, lab in enumerate(labels)}
        count = n if n is not None else max(len(labels), 1)
        pairs = [(mapping[a], mapping[b]) for a, b in raw_pairs]

    try:
        g = UndirectedGraph.from_edge_list(count, pairs)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e
    return g, mapping


def _is_int(s: str) -> bool:
    try:
        int(s)
        return True
    except ValueError:
        return False


def _label_key(s: str):
    return (0, int(s), "") if _is_int(s) else (1, 0, s)


def write_edge_csv(path, g: UndirectedGraph) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write("source,target\n")
        for i, j in g.to_edge_list():
            fh.write(f"{i},{j}\n")
    return path


def read_attr_csv(path, n: int | None = None) -> NodeAttributes:
    """Load ``node,<name>...`` rows; every node 0..n-1 must appear exactly once."""
    rows = _open_rows(path)
    header, body = rows[0], rows[1:]
    if not header or header[0].strip().lower() != "node":
        raise InputError(f"{path}: expected first header column 'node'")
    names = [h.strip() for h in header[1:]]
    if not names:
        raise InputError(f"{path}: no attribute columns")
    count = n if n is not None else len(body)
    seen: dict[int, list[str]] = {}
    for ln, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise InputError(f"{path}:{ln}: expected {len(header)} columns, got {len(row)}")
        if not _is_int(row[0]):
            raise InputError(f"{path}:{ln}: node id {row[0]!r} is not an integer")
        node = int(row[0])
        if not 0 <= node < count:
            raise InputError(f"{path}:{ln}: node {node} out of range for n={count}")
        if node in seen:
            raise InputError(f"{path}:{ln}: node {node} listed twice")
        seen[node] = [c.strip() for c in row[1:]]
    missing = [i for i in range(count) if i not in seen]
    if missing:
        raise InputError(f"{path}: missing attribute rows for nodes {missing[:5]}")
    attrs = NodeAttributes(count)
    for c, name in enumerate(names):
        col = [seen[i][c] for i in range(count)]
        if all(_is_float(v) for v in col):
            attrs.add(name, [float(v) for v in col])
        else:
            attrs.add(name, col)
    return attrs


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def write_attr_csv(path, attrs: NodeAttributes) -> Path:
    path = Path(path)
    names = attrs.names
    with open(path, "w") as fh:
        fh.write("node," + ",".join(names) + "\n")
        for i in range(attrs.n):
            cells = []
            for name in names:
                v = attrs.values_list(name)[i]
                cells.append(repr(v) if isinstance(v, float) else str(v))
            fh.write(f"{i}," + ",".join(cells) + "\n")
    return path


def read_model_config(path) -> ModelSpec:
    """Parse a JSON model document: {"terms": [{kind, ...}], "theta": [...]}."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"file not found: {path}")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object at top level")
    return ModelSpec.from_dict(doc)


def write_model_config(path, spec: ModelSpec) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_stats_csv(path, stats: np.ndarray, term_names, densities=None) -> Path:
    """One row per retained draw: index, per-term statistics, graph density."""
    path = Path(path)
    stats = np.atleast_2d(stats)
    with open(path, "w") as fh:
        cols = ["draw", *term_names]
        if densities is not None:
            cols.append("density")
        fh.write(",".join(cols) + "\n")
        for d in range(stats.shape[0]):
            cells = [str(d)] + [repr(float(v)) for v in stats[d]]
            if densities is not None:
                cells.append(repr(float(densities[d])))
            fh.write(",".join(cells) + "\n")
    return path


def read_stats_csv(path) -> tuple[np.ndarray, list[str], np.ndarray | None]:
    """Inverse of write_stats_csv: (stats, term names, densities or None)."""
    rows = _open_rows(path)
    header, body = rows[0], rows[1:]
    if not header or header[0] != "draw":
        raise InputError(f"{path}: expected first column 'draw'")
    names = header[1:]
    has_density = bool(names) and names[-1] == "density"
    if has_density:
        names = names[:-1]
    if not names:
        raise InputError(f"{path}: no statistic columns")
    stats = np.empty((len(body), len(names)))
    dens = np.empty(len(body)) if has_density else None
    for r, row in enumerate(body):
        if len(row) != len(header):
            raise InputError(f"{path}:{r + 2}: expected {len(header)} columns")
        try:
            vals = [float(v) for v in row[1:]]
        except ValueError as e:
            raise InputError(f"{path}:{r + 2}: non-numeric cell: {e}") from e
        stats[r] = vals[: len(names)]
        if has_density:
            dens[r] = vals[-1]
    return stats, names, dens


def write_fit_json(path, fit: FitResult, extra: dict | None = None) -> Path:
    path = Path(path)
    doc = fit.to_dict()
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_fit_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise InputError(f"file not found: {path}")
    with open(path) as fh:
        return json.load(fh)


def write_manifest(
    out_dir,
    command: str,
    argv: list[str],
    config: dict,
    outputs: list[str],
    elapsed_s: float,
) -> Path:
    """Run record: command, arguments, resolved config, produced files, timing.

    Primary outputs reference this file by name; the manifest itself carries
    the wall clock and is the one output allowed to differ between reruns.
    """
    from . import __version__

    path = Path(out_dir) / "manifest.json"
    doc = {
        "command": command,
        "argv": argv,
        "config": config,
        "outputs": sorted(outputs),
        "elapsed_s": elapsed_s,
        "version": __version__,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise InputError(f"manifest not found: {path}")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from e
    for key in ("command", "argv"):
        if key not in doc:
            raise InputError(f"{path}: manifest missing {key!r}")
    return doc

"""FigureSpec: a small JSON document naming a figure kind and its inputs.

    {"kind": "latency_curve", "bundle": "runs/exp1", "options": {...}}
    {"kind": "sweep_panel", "table": "runs/sweep/sweep_summary.csv"}

kind ∈ KINDS. bundle points at a bundle directory (all kinds except
sweep_panel, which takes table = a sweep_summary.csv). options is an open
dict; each renderer documents the keys it reads. Relative paths are resolved
against the spec file's own directory.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .reading import Bundle, FormatError, read_sweep_table

KINDS = ("latency_curve", "probe_bars", "trajectories", "map_composite", "sweep_panel")


@dataclass
class FigureSpec:
    kind: str
    bundle: Optional[Path] = None
    table: Optional[Path] = None
    options: dict = field(default_factory=dict)


def load_spec(path) -> FigureSpec:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})")
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise FormatError(f"{path}: kind must be one of {KINDS}, got {kind!r}")
    spec = FigureSpec(kind=kind, options=doc.get("options", {}))
    if not isinstance(spec.options, dict):
        raise FormatError(f"{path}: options must be an object")
    base = path.parent
    if kind == "sweep_panel":
        if "table" not in doc:
            raise FormatError(f"{path}: sweep_panel requires a 'table' path")
        spec.table = (base / doc["table"]).resolve() if not Path(doc["table"]).is_absolute() \
            else Path(doc["table"])
    else:
        if "bundle" not in doc:
            raise FormatError(f"{path}: {kind} requires a 'bundle' path")
        spec.bundle = (base / doc["bundle"]).resolve() if not Path(doc["bundle"]).is_absolute() \
            else Path(doc["bundle"])
    return spec


def validate_inputs(spec: FigureSpec):
    """Check every referenced input exists and passes schema validation.

    Runs before any rendering. Returns the Bundle for bundle-backed kinds,
    the parsed sweep rows for sweep_panel.
    """
    if spec.kind == "sweep_panel":
        return read_sweep_table(spec.table)
    b = Bundle(spec.bundle)
    if spec.kind == "latency_curve":
        b.trials()
    elif spec.kind == "probe_bars":
        b.probe_metrics()
    elif spec.kind == "trajectories":
        b.records()
    elif spec.kind == "map_composite":
        probes = b.map_probe_indices()
        if not probes:
            raise FormatError(f"{spec.bundle}: no maps/ directory "
                              "(run the map extraction step first)")
        pi = int(spec.options.get("probe", probes[-1]))
        b.map_docs("value", pi)
    return b

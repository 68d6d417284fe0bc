"""Readers for result-bundle directories.

A bundle is a flat directory:

    manifest.json       schema id "navac.bundle.v1", full config dict,
                        config_hash (12 hex chars), backend, n_seeds, files
    trials.csv          one row per trial, training and probe
    probe_metrics.csv   one row per probe trial with near-target occupancy
    probe_summary.csv   per (seed, probe index) aggregate
    probe_records.npz   optional step-level probe trajectories
    maps/*.json         optional 15x15 binned maps, schema "navac.map.v1"

Only the columns listed in REQUIRED_COLUMNS are consumed; extra columns are
ignored so the producer can evolve additively. All validation errors raise
FormatError with the file and the offending column or field in the message.
"""
import csv
import json
from pathlib import Path

import jsonschema
import numpy as np


class FormatError(Exception):
    """A bundle file is missing, malformed, or lacks a required column."""


MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["schema", "config", "config_hash", "files"],
    "properties": {
        "schema": {"const": "navac.bundle.v1"},
        "config": {"type": "object"},
        "config_hash": {"type": "string", "pattern": "^[0-9a-f]{12}$"},
        "files": {"type": "array", "items": {"type": "string"}},
    },
}

MAP_SCHEMA = {
    "type": "object",
    "required": ["schema", "kind", "config_hash", "probe_index", "cue_id",
                 "n", "extent", "cells", "counts"],
    "properties": {
        "schema": {"const": "navac.map.v1"},
        "kind": {"enum": ["value", "policy", "td"]},
        "config_hash": {"type": "string"},
        "probe_index": {"type": "integer"},
        "cue_id": {"type": "integer"},
        "n": {"const": 15},
        "extent": {"type": "array"},
        "cells": {"type": "array", "minItems": 15, "maxItems": 15},
        "counts": {"type": "array", "minItems": 15, "maxItems": 15},
    },
}

REQUIRED_COLUMNS = {
    "trials.csv": ("seed", "session", "trial", "cue_id", "probe", "latency"),
    "probe_metrics.csv": ("seed", "probe_index", "cue_id",
                          "time_near_correct", "visit_ratio"),
    "probe_summary.csv": ("seed", "probe_index", "visit_ratio_mean",
                          "associations_learned"),
}

SWEEP_COLUMNS = ("axis", "value", "seed", "associations_learned",
                 "visit_ratio_mean", "dimensionality", "config_hash", "error")


def read_table(path, required) -> list:
    """CSV rows as string dicts; checks header against required columns."""
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"{path}: file not found")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise FormatError(f"{path.name}: missing column {col!r} "
                                  f"(present: {', '.join(header)})")
        return list(reader)


def _num(row, col, cast=float):
    try:
        return cast(row[col])
    except (TypeError, ValueError):
        raise FormatError(f"column {col!r}: non-numeric value {row[col]!r}")


class Bundle:
    """Read-side view of one bundle directory; validates on access."""

    def __init__(self, bundle_dir):
        self.dir = Path(bundle_dir)
        man = self.dir / "manifest.json"
        if not man.is_file():
            raise FormatError(f"{self.dir}: no manifest.json (not a bundle?)")
        try:
            self.manifest = json.loads(man.read_text())
            jsonschema.validate(self.manifest, MANIFEST_SCHEMA)
        except json.JSONDecodeError as e:
            raise FormatError(f"{man}: invalid JSON ({e})")
        except jsonschema.ValidationError as e:
            field = "/".join(str(p) for p in e.absolute_path) or "top level"
            raise FormatError(f"{man}: schema violation at {field}: {e.message}")

    @property
    def config_hash(self) -> str:
        return self.manifest["config_hash"]

    @property
    def task_kind(self) -> str:
        return self.manifest["config"].get("task", {}).get("kind", "")

    @property
    def n_pairs(self) -> int:
        return int(self.manifest["config"].get("task", {}).get("n_pairs", 6))

    def trials(self) -> list:
        rows = read_table(self.dir / "trials.csv", REQUIRED_COLUMNS["trials.csv"])
        return [{"seed": _num(r, "seed", int), "session": _num(r, "session", int),
                 "trial": _num(r, "trial", int), "cue_id": _num(r, "cue_id", int),
                 "probe": r["probe"] == "1", "latency": _num(r, "latency")}
                for r in rows]

    def probe_metrics(self) -> list:
        rows = read_table(self.dir / "probe_metrics.csv",
                          REQUIRED_COLUMNS["probe_metrics.csv"])
        return [{"seed": _num(r, "seed", int),
                 "probe_index": _num(r, "probe_index", int),
                 "cue_id": _num(r, "cue_id", int),
                 "time_near_correct": _num(r, "time_near_correct"),
                 "visit_ratio": _num(r, "visit_ratio")}
                for r in rows]

    def probe_summary(self) -> list:
        rows = read_table(self.dir / "probe_summary.csv",
                          REQUIRED_COLUMNS["probe_summary.csv"])
        return [{"seed": _num(r, "seed", int),
                 "probe_index": _num(r, "probe_index", int),
                 "visit_ratio_mean": _num(r, "visit_ratio_mean"),
                 "associations_learned": _num(r, "associations_learned", int)}
                for r in rows]

    def records(self) -> list:
        """Step-level probe trajectories, one dict per recorded trial."""
        path = self.dir / "probe_records.npz"
        if not path.is_file():
            raise FormatError(f"{path}: file not found "
                              "(bundle was written without trajectory records)")
        with np.load(path) as z:
            if "index_json" not in z:
                raise FormatError(f"{path.name}: missing member 'index_json'")
            index = json.loads(bytes(z["index_json"].tobytes()))
            out = []
            for entry in index:
                key = entry["key"]
                for suffix in ("_pos", "_v"):
                    if key + suffix not in z:
                        raise FormatError(f"{path.name}: missing member {key + suffix!r}")
                out.append({**entry, "pos": z[key + "_pos"], "v": z[key + "_v"]})
        return out

    def map_probe_indices(self) -> list:
        found = set()
        for p in sorted((self.dir / "maps").glob("*_p*_c*.json")):
            found.add(int(p.stem.split("_p")[1].split("_c")[0]))
        return sorted(found)

    def map_docs(self, kind: str, probe_index: int) -> list:
        """Validated map documents of one kind at one probe, sorted by cue."""
        docs = []
        for p in sorted((self.dir / "maps").glob(f"{kind}_p{probe_index}_c*.json")):
            doc = json.loads(p.read_text())
            try:
                jsonschema.validate(doc, MAP_SCHEMA)
            except jsonschema.ValidationError as e:
                field = "/".join(str(q) for q in e.absolute_path) or "top level"
                raise FormatError(f"{p.name}: schema violation at {field}: {e.message}")
            docs.append(doc)
        if not docs:
            raise FormatError(f"{self.dir}/maps: no {kind}_p{probe_index}_c*.json files")
        return sorted(docs, key=lambda d: d["cue_id"])


def read_sweep_table(path) -> list:
    """sweep_summary.csv rows; failed points keep their error text."""
    rows = read_table(path, SWEEP_COLUMNS)
    out = []
    for r in rows:
        if r["error"]:
            out.append({"value": r["value"], "error": r["error"]})
            continue
        out.append({"value": r["value"], "seed": _num(r, "seed", int),
                    "associations_learned": _num(r, "associations_learned", int),
                    "visit_ratio_mean": _num(r, "visit_ratio_mean"),
                    "dimensionality": r["dimensionality"],
                    "config_hash": r["config_hash"], "error": ""})
    return out

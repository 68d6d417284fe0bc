"""Result bundle I/O.

A bundle directory holds everything one experiment run produced:

    manifest.json       schema id, config, config hash, code version, backend
    trials.csv          one row per trial per seed
    probe_metrics.csv   one row per probe trial per seed
    probe_summary.csv   one row per (seed, probe index)
    probe_records.npz   raw probe trajectories (optional, for map generation)
    maps/*.json         spatial maps (written on demand)

All files are plain CSV / JSON / npz so downstream tools need no imports from
this package. Writes are deterministic: rerunning the same config produces
byte-identical files (no timestamps anywhere, fixed zip metadata).
"""

from __future__ import annotations

import io
import json
import zipfile
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .config import RunConfig, _to_dict, config_hash, load_config

SCHEMA_ID = "navac.bundle.v1"

TRIALS_COLUMNS = [
    "seed", "phase", "session", "slot", "trial", "cue_id", "probe",
    "start_x", "start_y", "target_x", "target_y",
    "latency", "found", "steps", "status", "config_hash",
]
PROBE_METRICS_COLUMNS = [
    "seed", "probe_index", "session", "cue_id", "latency",
    "time_near_correct", "time_near_any", "visit_ratio", "found", "config_hash",
]
PROBE_SUMMARY_COLUMNS = [
    "seed", "probe_index", "session", "n_trials", "latency_mean",
    "time_near_correct_mean", "visit_ratio_mean", "associations_learned",
    "config_hash",
]

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["schema", "config", "config_hash", "code_version", "backend",
                 "n_seeds", "aborted_trials", "files"],
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "config": {"type": "object"},
        "config_hash": {"type": "string", "pattern": "^[0-9a-f]{12}$"},
        "code_version": {"type": "string"},
        "backend": {"type": "string"},
        "n_seeds": {"type": "integer", "minimum": 1},
        "aborted_trials": {"type": "integer", "minimum": 0},
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


def fmt(x) -> str:
    """Canonical cell formatting: shortest round-trip repr for floats."""
    if isinstance(x, bool) or isinstance(x, np.bool_):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, columns, rows):
    # hand-rolled writer: every value passes through fmt, \n endings everywhere
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(row[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n")


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=1, sort_keys=True) + "\n").encode()


def _write_npz(path: Path, arrays: dict):
    """np.savez equivalent with pinned zip timestamps for reproducible bytes."""
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
        for name in sorted(arrays):
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.ascontiguousarray(arrays[name]))
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, buf.getvalue())


def _trial_row(t, h):
    return {
        "seed": t.seed, "phase": t.phase, "session": t.session, "slot": t.slot,
        "trial": t.global_index, "cue_id": t.cue_id, "probe": t.probe,
        "start_x": t.start[0], "start_y": t.start[1],
        "target_x": t.target[0], "target_y": t.target[1],
        "latency": t.latency, "found": t.found, "steps": t.steps,
        "status": t.status, "config_hash": h,
    }


def _metrics_row(m, h):
    return {
        "seed": m.seed, "probe_index": m.probe_index, "session": m.session,
        "cue_id": m.cue_id, "latency": m.latency,
        "time_near_correct": m.time_near_correct, "time_near_any": m.time_near_any,
        "visit_ratio": m.visit_ratio, "found": m.found, "config_hash": h,
    }


def write_bundle(out_dir, result, backend_name: str) -> Path:
    """Persist an ExperimentResult; returns the manifest path."""
    from .protocols import probe_summary  # local import avoids a cycle

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = result.config_hash
    cfg = result.config

    _write_csv(out / "trials.csv", TRIALS_COLUMNS,
               [_trial_row(t, h) for sim in result.sims for t in sim.trials])
    _write_csv(out / "probe_metrics.csv", PROBE_METRICS_COLUMNS,
               [_metrics_row(m, h) for sim in result.sims for m in sim.probe_metrics])
    _write_csv(out / "probe_summary.csv", PROBE_SUMMARY_COLUMNS,
               [dict(r, config_hash=h) for r in probe_summary(result.sims)])

    files = ["trials.csv", "probe_metrics.csv", "probe_summary.csv"]
    records = [(sim, rec) for sim in result.sims for rec in sim.probe_records]
    if records:
        arrays, index = {}, []
        for i, (sim, rec) in enumerate(records):
            r = rec.result
            key = f"r{i:04d}"
            arrays[key + "_pos"] = r.pos
            arrays[key + "_act"] = r.act
            arrays[key + "_v"] = r.v
            arrays[key + "_delta"] = r.delta
            index.append({
                "key": key, "seed": sim.seed, "probe_index": rec.probe_index,
                "session": rec.plan.session, "trial": rec.plan.global_index,
                "cue_id": rec.plan.cue_id, "nav_offset": rec.nav_offset,
                "target": list(rec.plan.target), "steps": r.steps,
            })
        arrays["index_json"] = np.frombuffer(_json_bytes(index), dtype=np.uint8)
        _write_npz(out / "probe_records.npz", arrays)
        files.append("probe_records.npz")

    manifest = {
        "schema": SCHEMA_ID,
        "config": _to_dict(cfg),
        "config_hash": h,
        "code_version": __version__,
        "backend": backend_name,
        "n_seeds": cfg.n_seeds,
        "aborted_trials": int(sum(s.aborted for s in result.sims)),
        "files": files,
    }
    jsonschema.validate(manifest, MANIFEST_SCHEMA)
    (out / "manifest.json").write_bytes(_json_bytes(manifest))
    return out / "manifest.json"


def write_map(out_dir, kind: str, map_dict: dict, cfg_hash: str,
              probe_index: int, cue_id: int) -> Path:
    out = Path(out_dir) / "maps"
    out.mkdir(parents=True, exist_ok=True)
    doc = {"schema": "navac.map.v1", "kind": kind, "config_hash": cfg_hash,
           "probe_index": probe_index, "cue_id": cue_id, **map_dict}
    jsonschema.validate(doc, MAP_SCHEMA)
    path = out / f"{kind}_p{probe_index}_c{cue_id}.json"
    path.write_bytes(_json_bytes(doc))
    return path


class BundleReader:
    """Read-side view of a bundle directory."""

    def __init__(self, bundle_dir):
        self.dir = Path(bundle_dir)
        self.manifest = json.loads((self.dir / "manifest.json").read_text())
        jsonschema.validate(self.manifest, MANIFEST_SCHEMA)

    @property
    def config_hash(self) -> str:
        return self.manifest["config_hash"]

    def config(self) -> RunConfig:
        from .config import config_from_dict
        return config_from_dict(self.manifest["config"])

    def table(self, name: str) -> list:
        """CSV rows as dicts; numeric strings converted to int/float."""
        lines = (self.dir / name).read_text().splitlines()
        header = lines[0].split(",")
        rows = []
        for line in lines[1:]:
            vals = line.split(",")
            row = {}
            for k, v in zip(header, vals):
                try:
                    row[k] = int(v)
                except ValueError:
                    try:
                        row[k] = float(v)
                    except ValueError:
                        row[k] = v
            rows.append(row)
        return rows

    def probe_records(self) -> list:
        """Entries: index dict + pos/act/v/delta arrays."""
        path = self.dir / "probe_records.npz"
        if not path.exists():
            raise FileNotFoundError(f"{path} not in bundle (record_probe_steps off?)")
        with np.load(path) as z:
            index = json.loads(bytes(z["index_json"]))
            out = []
            for ent in index:
                key = ent["key"]
                out.append({**ent,
                            "pos": z[key + "_pos"], "act": z[key + "_act"],
                            "v": z[key + "_v"], "delta": z[key + "_delta"]})
        return out


def validate_bundle(bundle_dir) -> list:
    """Returns a list of problem strings; empty means the bundle checks out."""
    problems = []
    d = Path(bundle_dir)
    try:
        reader = BundleReader(d)
    except FileNotFoundError:
        return [f"missing manifest.json in {d}"]
    except jsonschema.ValidationError as e:
        return [f"manifest schema: {e.message}"]
    h = reader.config_hash
    if config_hash(reader.config()) != h:
        problems.append("config_hash does not match the embedded config")
    expected_cols = {"trials.csv": TRIALS_COLUMNS,
                     "probe_metrics.csv": PROBE_METRICS_COLUMNS,
                     "probe_summary.csv": PROBE_SUMMARY_COLUMNS}
    for name in reader.manifest["files"]:
        if not (d / name).exists():
            problems.append(f"declared file missing: {name}")
            continue
        if name in expected_cols:
            header = (d / name).read_text().splitlines()[0].split(",")
            for col in expected_cols[name]:
                if col not in header:
                    problems.append(f"{name}: missing column {col}")
            for row in reader.table(name):
                if row.get("config_hash") != h:
                    problems.append(f"{name}: row with foreign config_hash")
                    break
    for mp in sorted(d.glob("maps/*.json")):
        try:
            doc = json.loads(mp.read_text())
            jsonschema.validate(doc, MAP_SCHEMA)
            if doc["config_hash"] != h:
                problems.append(f"{mp.name}: foreign config_hash")
        except (json.JSONDecodeError, jsonschema.ValidationError) as e:
            problems.append(f"{mp.name}: {e}")
    return problems


def load_run_config(path) -> RunConfig:
    return load_config(path)

import json

import pytest

from navplots.figspec import KINDS, load_spec, validate_inputs
from navplots.reading import FormatError


def _spec(tmp_path, doc, name="fig.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_load_and_resolve_relative(bundles, tmp_path):
    p = _spec(tmp_path, {"kind": "latency_curve", "bundle": str(bundles["single"])})
    spec = load_spec(p)
    assert spec.kind == "latency_curve" and spec.bundle.is_dir()
    assert validate_inputs(spec).config_hash


def test_unknown_kind(tmp_path):
    p = _spec(tmp_path, {"kind": "pie_chart", "bundle": "x"})
    with pytest.raises(FormatError, match="kind must be one of"):
        load_spec(p)
    assert "pie_chart" not in KINDS


def test_missing_bundle_key(tmp_path):
    p = _spec(tmp_path, {"kind": "probe_bars"})
    with pytest.raises(FormatError, match="requires a 'bundle'"):
        load_spec(p)


def test_sweep_requires_table(tmp_path):
    p = _spec(tmp_path, {"kind": "sweep_panel"})
    with pytest.raises(FormatError, match="requires a 'table'"):
        load_spec(p)


def test_validate_inputs_missing_dir(tmp_path):
    p = _spec(tmp_path, {"kind": "latency_curve", "bundle": "does_not_exist"})
    with pytest.raises(FormatError, match="manifest.json"):
        validate_inputs(load_spec(p))


def test_validate_inputs_no_maps(bundles, tmp_path):
    p = _spec(tmp_path, {"kind": "map_composite", "bundle": str(bundles["single"])})
    with pytest.raises(FormatError, match="no maps"):
        validate_inputs(load_spec(p))


def test_bad_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{nope")
    with pytest.raises(FormatError, match="invalid JSON"):
        load_spec(p)

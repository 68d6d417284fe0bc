"""Smoke bundles for the renderer tests.

Produced through the simulation CLI as a subprocess; this package has no
import-level dependency on the engine, so the suite skips when the `navac`
executable is not on PATH.
"""
import shutil
import subprocess

import pytest

NAVAC = shutil.which("navac")


def _run(args):
    r = subprocess.run(args, capture_output=True, text=True, timeout=600)
    assert r.returncode == 0, f"{' '.join(args)}\n{r.stderr}"


@pytest.fixture(scope="session")
def bundles(tmp_path_factory):
    if NAVAC is None:
        pytest.skip("navac CLI not installed")
    root = tmp_path_factory.mktemp("bundles")
    single = root / "single"
    multi = root / "multi"
    _run([NAVAC, "run", "--task", "single_reward", "--arch", "classic",
          "--seeds", "2", "--slots", "12", "--t-max", "60", "--master-seed", "77",
          "--no-records", "--out", str(single)])
    _run([NAVAC, "run", "--task", "multi_pa", "--arch", "classic",
          "--seeds", "2", "--sessions", "3", "--t-max", "60", "--master-seed", "77",
          "--records", "--out", str(multi)])
    _run([NAVAC, "maps", "--bundle", str(multi), "--probe", "1"])
    return {"single": single, "multi": multi}


@pytest.fixture(scope="session")
def sweep_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweep") / "sweep_summary.csv"
    lines = ["axis,value,seed,associations_learned,visit_ratio_mean,dimensionality,config_hash,error"]
    for v, base in (("0.5", 0.18), ("2.0", 0.34)):
        for s in range(3):
            lines.append(f"tau_g,{v},{s},{s % 3},{base + 0.01 * s},67,deadbeef0123,")
    lines.append('tau_g,9.0,0,,,,,"invalid config: tau_g out of range"')
    path.write_text("\n".join(lines) + "\n")
    return path

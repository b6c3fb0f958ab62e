"""Smoke test for the cornersim Python extension.

Uses an installed `cornersim` module if importable, otherwise builds the
extension with cargo and loads it straight from the target directory.
"""

import importlib.machinery
import importlib.util
import os
import pathlib
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import cornersim

        return cornersim
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "cornersim-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    target = pathlib.Path(os.environ.get("CARGO_TARGET_DIR", ROOT / "target")) / "release"
    lib = next(p for p in target.iterdir() if p.name.startswith("libcornersim_py.") and p.suffix in (".so", ".dylib"))
    loader = importlib.machinery.ExtensionFileLoader("cornersim", str(lib))
    spec = importlib.util.spec_from_file_location("cornersim", lib, loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def main():
    cs = load()
    assert cs.__version__ == "1.0.0"

    scenarios = cs.list_scenarios()
    assert len(scenarios) == 32, len(scenarios)
    assert len(cs.list_scenarios("evidence")) == 9
    assert {w[0] for w in cs.weather_presets()} >= {"clear-noon", "fog-morning"}

    ok = cs.run("luggage-fall")
    assert ok["outcome"] == "success", ok
    again = cs.run("luggage-fall")
    assert again["trace_hash"] == ok["trace_hash"], "runs are not deterministic"

    crash = cs.run("luggage-fall", policy="builtin:constant_speed")
    assert crash["outcome"] == "collision_failure", crash
    assert crash["severity_score"] > 0 and crash["collisions"]

    with tempfile.TemporaryDirectory() as tmp:
        rec = cs.run("luggage-fall", seed=7, weather="fog-morning", out=tmp)
        trace_hash, outcome = cs.replay(rec["run_dir"])
        assert (trace_hash, outcome) == (rec["trace_hash"], rec["outcome"])

    text = (ROOT / "catalog/evidence/luggage-fall.3cs").read_text()
    assert cs.validate(text) == []
    assert cs.validate(text.replace("tn = 30.0", "tn = 0.0"))
    assert cs.validate("not [ toml")

    for bad in [lambda: cs.run("no-such"), lambda: cs.run("luggage-fall", policy="nope")]:
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test ok: %d scenarios, hash %s" % (len(scenarios), ok["trace_hash"][:12]))


if __name__ == "__main__":
    sys.exit(main())

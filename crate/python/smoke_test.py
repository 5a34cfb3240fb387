"""Smoke test for the skewdemand Python extension.

Uses an installed `skewdemand` module if there is one, otherwise loads the
library built by `cargo build -p skewdemand-py --features extension-module --release`.
"""

import importlib.machinery
import importlib.util
import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import skewdemand

        return skewdemand
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for name in ("libskewdemand.so", "libskewdemand.dylib", "skewdemand.dll"):
            path = ROOT / "target" / profile / name
            if path.exists():
                loader = importlib.machinery.ExtensionFileLoader("skewdemand", str(path))
                spec = importlib.util.spec_from_loader("skewdemand", loader)
                module = importlib.util.module_from_spec(spec)
                loader.exec_module(module)
                sys.modules["skewdemand"] = module
                return module
    sys.exit("skewdemand extension not found; build it with "
             "`cargo build -p skewdemand-py --features extension-module --release`")


def main():
    sd = load()

    assert abs(sd.erf(1.0) - math.erf(1.0)) < 1e-15
    assert abs(sd.erfc(3.0) - math.erfc(3.0)) < 1e-15 * math.erfc(3.0) * 10

    peak = sd.PeakComponent(10.0, 8.0, 2.0, 1.0)
    assert peak.eval(8.0) == 10.0
    assert len(peak.gradient(9.0)) == 4

    truth = sd.DecompositionModel(3.0, [peak])
    values = truth.sample()
    assert len(values) == 24 and min(values) >= 3.0

    # positive skew moves the mode past the location
    assert sd.detect_peaks(values) == [(9, values[9], "interior-max")]

    report = sd.fit(values, label="smoke")
    assert report.model.baseline <= 3.0 + 1e-9
    assert len(report.model.peaks) == 1
    assert report.metrics["r_squared"] > 0.999
    assert report.loss <= sd.fit(values, sd.FitConfig(sigma_starts=[2.0], alpha_starts=[0.0])).loss
    doc = json.loads(report.to_json())
    assert doc["model"]["n_peaks"] == 1 and doc["profile"]["label"] == "smoke"

    sym = sd.fit(values, sd.FitConfig(symmetric=True))
    assert all(p.skewness == 0.0 for p in sym.model.peaks)

    skewed = sd.DecompositionModel(2.0, [sd.PeakComponent(20.0, 8.0, 2.5, -2.0)]).sample()
    sk, sy = sd.fit_both(skewed)
    assert sk.loss <= sy.loss
    assert sy.metrics["rmse"] >= 1.5 * sk.metrics["rmse"]

    m = sd.compute_metrics([0.0, 2.0], [1.0, 1.0])
    assert m["rmse"] == 1.0 and m["r_squared"] == 0.0

    scenario = (ROOT / "scenarios" / "table6.scenario").read_text()
    week = sd.generate(scenario)
    assert [label for label, _ in week][0] == "Sunday" and len(week) == 7
    assert all(series == week[0][1] for _, series in week[1:5])
    assert week[5][1] != week[0][1]

    parsed, unit = sd.parse_profile_csv((ROOT / "fixtures" / "separated.csv").read_text())
    assert len(parsed) == 24 and unit == "m3/h"

    config = sd.FitConfig(max_iterations=0)
    try:
        config.validate()
    except ValueError:
        pass
    else:
        raise AssertionError("max_iterations=0 should be rejected")

    print("python smoke test passed")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Smoke test for the leolink_py extension module.

Build the module first, then run this script:

    cargo build --release -p leolink-py
    python3 python/smoke_test.py
"""
import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_module():
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libleolink_py.so", "leolink_py.so", "libleolink_py.dylib")
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit("leolink_py not built; run: cargo build --release -p leolink-py")
    staging = Path(tempfile.mkdtemp(prefix="leolink_py_"))
    shutil.copy2(lib, staging / "leolink_py.so")
    sys.path.insert(0, str(staging))
    import leolink_py  # noqa: E402

    return leolink_py


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    m = import_module()
    print(f"imported leolink_py {m.__version__}")

    # special functions
    approx(m.bessel_j1(1.0), 0.4400505857449335, 1e-12)
    approx(m.confluent_1f1(1.0, 1.0, 2.0), math.e**2, 1e-12)
    approx(m.kummer_polynomial(2, 1.0), 2 * math.e, 1e-12)
    approx(m.lower_incomplete_gamma(3, 2.0), 0.646647167633873, 1e-12)
    print("special functions ok")

    # distribution family
    light = m.shadowing_params("light")
    approx(light.mean_power(), 1.606, 1e-12)
    dist = m.SsrDistribution(light)
    assert dist.m_rounded == 19
    approx(dist.cdf_int(1.606), 0.56814328631995019, 1e-9)
    approx(dist.cdf(1.606), 0.5681, 2e-3)
    samples = dist.sample(200_000, seed=7)
    mean = sum(samples) / len(samples)
    approx(mean, 1.606, 0.02)
    assert dist.sample(5, seed=7) == samples[:5], "seeded determinism"
    scaled = light.scaled(10.0)
    approx(scaled.omega, 12.9, 1e-12)
    print("shadowed Rician statistics ok")

    # geometry and antenna
    approx(m.slant_distance(600.0, 90.0), 600.0, 1e-9)
    approx(m.slant_distance(600.0, 45.0), 814.830408857363, 1e-6)
    cells = m.hex_layout(10.0, 2, 3)
    assert len(cells) == 19
    color_sizes = sorted([sum(1 for c in cells if c[2] == k) for k in range(3)])
    assert color_sizes == [6, 6, 7], color_sizes
    a = m.calibrate_aperture(10.0, 600.0, 0.015)
    approx(a, 0.231555797070, 1e-9)
    pat = m.DishPattern(a, 0.015, 38.5)
    approx(pat.normalized_gain(math.degrees(math.atan(10 / 600))), 0.5, 1e-9)
    print("geometry and antenna ok")

    # engine
    config = json.dumps(
        {
            "layout": {"reuse_factor": 3},
            "user_grid": {"extent_km": 10.0, "resolution_km": 1.0},
            "realizations_per_point": 100,
            "seed": 3,
        }
    )
    snr_db, inr_db, sir_db = m.large_scale_link(config, 0.0, 0.0)
    approx(snr_db, 13.52, 0.05)
    approx(sir_db, snr_db - inr_db, 1e-9)
    q1 = m.run_cdf_quantiles(config, "sinr", "center-cell", [0.25, 0.5, 0.75])
    q2 = m.run_cdf_quantiles(config, "sinr", "center-cell", [0.25, 0.5, 0.75])
    assert q1 == q2, "deterministic engine"
    assert q1[0] <= q1[1] <= q1[2]
    nx, ny, values = m.run_map(config, "gain", "large-scale")
    assert nx == ny == 21 and len(values) == nx * ny
    center = values[(ny // 2) * nx + nx // 2]
    approx(center, 38.5, 1e-9)
    print("engine ok")

    print("smoke test passed")


if __name__ == "__main__":
    main()

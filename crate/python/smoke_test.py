"""Build the bakerlab extension with cargo, import it and exercise the main calls.

Usage: python3 python/smoke_test.py [--no-build]
"""

import argparse
import cmath
import json
import math
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build_and_stage(build: bool) -> pathlib.Path:
    if build:
        subprocess.run(["cargo", "build", "-p", "bakerlab-py", "--release"], cwd=ROOT, check=True)
    built = ROOT / "target" / "release" / "libbakerlab.so"
    if not built.exists():
        sys.exit(f"extension not found at {built}")
    stage = pathlib.Path(tempfile.mkdtemp(prefix="bakerlab-py-"))
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy(built, stage / f"bakerlab{suffix}")
    return stage


def check(cond: bool, what: str) -> None:
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        check.failed = True


check.failed = False


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--no-build", action="store_true", help="reuse target/release/libbakerlab.so")
    args = parser.parse_args()
    sys.path.insert(0, str(build_and_stage(not args.no_build)))
    import bakerlab as bl

    print("bakerlab", bl.__version__)

    b = bl.baker(16)
    check(b.shape == (16, 16) and b.is_unitary(), "baker(16) is a 16x16 unitary")
    r = bl.reflection(16)
    check((b @ r).max_abs_diff(r @ b) < 1e-10, "baker commutes with reflection")
    again = bl.ComplexMatrix.from_json(b.to_json())
    check(again.max_abs_diff(b) == 0.0, "cmatrix-json round trip is exact")
    check(json.loads(b.to_json())["dim_rows"] == 16, "json carries dim_rows")

    try:
        bl.baker(7)
        check(False, "odd baker rejected")
    except ValueError as e:
        check("even" in str(e), "odd baker rejected")

    part = bl.Bipartition(4, 4)
    check(abs(bl.cue_mean_entropy(part) - 9 / 17) < 1e-15, "CUE mean entropy 9/17 at 4x4")

    bell = [0j] * 4
    bell[0] = bell[3] = 1 / math.sqrt(2)
    check(abs(bl.linear_entropy(bell, bl.Bipartition(2, 2)) - 0.5) < 1e-12, "Bell state has S_L = 1/2")

    psi = bl.product_state(part, seed=1)
    check(bl.linear_entropy(psi, part) < 1e-12, "product state is unentangled")
    series = bl.entropy_timeseries(b, psi, part, 50)
    check(len(series) == 50 and all(0 <= s <= 0.75 for s in series), "time series in range")

    ep, holds = bl.asymptotic_entangling_power(b, part)
    check(holds and abs(ep - 0.5003) < 1e-3, f"e_p^inf(B16) = {ep:.6f}")
    mean, se = bl.time_and_state_average(b, part, 513, 2512, 200, 7)
    check(abs(mean - ep) < 3 * se, f"brute force {mean:.5f} +- {se:.5f} agrees")

    s_inf, _ = bl.asymptotic_entropy(b, psi, part)
    check(0 <= s_inf <= 0.75, "asymptotic entropy in range")

    phases = bl.eigenphases(b)
    check(len(phases) == 16 and all(0 <= p < 2 * math.pi for p in phases), "16 eigenphases in [0, 2pi)")
    check(bl.commensurability_check(phases)["violations_found"] == 0, "B16 has no resonances")

    va = bl.sample_unitary("cue", 4, seed=3)
    vb = bl.sample_unitary("cue", 4, seed=3, stream=1)
    report = bl.commensurability_check(bl.eigenphases(va.kron(vb)))
    check(report["violations_found"] > 0, "local unitary is flagged")

    sym = bl.sample_unitary("symmetric", 16, seed=5)
    check((sym @ r).max_abs_diff(r @ sym) < 1e-9, "symmetric sample commutes with reflection")
    coe = bl.sample_unitary("coe", 6, seed=5)
    check(all(cmath.isclose(coe[i, j], coe[j, i], abs_tol=1e-12) for i in range(6) for j in range(6)),
          "COE sample is symmetric")
    m1, _ = bl.entangling_power_mc(b, part, 1000, 9)
    m2, _ = bl.entangling_power_mc(b, part, 1000, 9)
    check(m1 == m2, "seeded Monte Carlo is deterministic")

    return 1 if check.failed else 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Run the hyperparameter sweeps of the bias demo end to end.

Four grids, each executed through ``ucr demo-bias``:

* constraint weight lambda_uc in {0, 0.01, 0.03, 0.05, 0.1, 0.2}
* constraint/regression loss kind in {l1, mse}
* invalid-region threshold m_invalid in {0, 0.1, 0.2, 0.5, 1.0} (2-D mapping;
  the 1.0 row gates the whole unit disc and is kept deliberately)
* mapping radius r^2 in {0.5, 1.5, 3.0} for the 3-D mapping, driven through
  the per-component amplitude s = sqrt(2 r^2 / 3)

Outputs land under --out, one directory per run, plus a manifest.json
describing every run. --quick shrinks repetitions/steps for smoke testing;
numeric results are harness regression values either way.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from ucr.cli import main as ucr_main

LAMBDA_UC_GRID = (0.0, 0.01, 0.03, 0.05, 0.1, 0.2)
LOSS_KIND_GRID = ("l1", "mse")
M_INVALID_GRID = (0.0, 0.1, 0.2, 0.5, 1.0)
RADIUS_SQ_GRID = (0.5, 1.5, 3.0)


def _run(out_dir: Path, extra_flags: list[str], fit_flags: list[str]) -> None:
    argv = ["demo-bias", "--out-dir", str(out_dir), *fit_flags, *extra_flags]
    code = ucr_main(argv)
    if code != 0:
        raise SystemExit(f"demo-bias failed with exit code {code}: {argv}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--quick", action="store_true", help="small repetitions/steps smoke mode"
    )
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    fit_flags = ["--seed", str(args.seed)]
    if args.quick:
        fit_flags += ["--repetitions", "5", "--samples", "32", "--steps", "40"]

    runs = []

    for lam in LAMBDA_UC_GRID:
        run_dir = out / "lambda_uc" / f"{lam:g}"
        _run(run_dir, ["--lambda-uc", str(lam)], fit_flags)
        runs.append({"sweep": "lambda_uc", "value": lam, "dir": str(run_dir.relative_to(out))})

    for kind in LOSS_KIND_GRID:
        run_dir = out / "loss_kind" / kind
        _run(run_dir, ["--uc-loss", kind, "--reg-loss", kind], fit_flags)
        runs.append({"sweep": "loss_kind", "value": kind, "dir": str(run_dir.relative_to(out))})

    for thr in M_INVALID_GRID:
        run_dir = out / "m_invalid" / f"{thr:g}"
        _run(run_dir, ["--m-invalid", str(thr)], fit_flags)
        runs.append({"sweep": "m_invalid", "value": thr, "dir": str(run_dir.relative_to(out))})

    for r2 in RADIUS_SQ_GRID:
        amplitude = math.sqrt(2.0 * r2 / 3.0)
        run_dir = out / "radius_sq" / f"{r2:g}"
        _run(run_dir, ["--dim", "3", "--amplitude", repr(amplitude)], fit_flags)
        runs.append({"sweep": "radius_sq", "value": r2, "dir": str(run_dir.relative_to(out))})

    manifest = {
        "quick": args.quick,
        "seed": args.seed,
        "grids": {
            "lambda_uc": list(LAMBDA_UC_GRID),
            "loss_kind": list(LOSS_KIND_GRID),
            "m_invalid": list(M_INVALID_GRID),
            "radius_sq": list(RADIUS_SQ_GRID),
        },
        "runs": runs,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(runs)} runs to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

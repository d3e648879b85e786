"""Accuracy and cost tables for every classification protocol on the shipped presets.

Writes one CSV and one Markdown table per preset into --out-dir.  The
benchmark-size presets (synthetic1-6, d = 50) take a long time with the
dense simplex learner, so they only run with --full.
"""

import argparse
from pathlib import Path

from distlearn.cli import main

QUICK = ["small", "guarantee", "adversarial2", "adversarial4"]
FULL = [f"synthetic{i}" for i in range(1, 7)]


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--full", action="store_true", help="also run the d=50 presets")
    args = ap.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for preset in QUICK + (FULL if args.full else []):
        code = main(["compare", "--preset", preset, "--trials", str(args.trials),
                     "--seed", str(args.seed), "--out", str(out / f"{preset}.csv"),
                     "--markdown", str(out / f"{preset}.md")])
        if code:
            return code
        print((out / f"{preset}.md").read_text())
    return 0


if __name__ == "__main__":
    raise SystemExit(run())

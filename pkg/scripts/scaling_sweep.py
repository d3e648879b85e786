"""Communication cost against dimension and against points per party."""

import argparse
from pathlib import Path

from distlearn.cli import main


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--dims", default="2,4,8,16")
    ap.add_argument("--sizes", default="250,500,1000,2000")
    args = ap.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    common = ["--preset", "small", "--trials", str(args.trials),
              "--protocol", "naive,voting,randemp,mwu,mwuemp"]
    for flag, values, name in (("--sweep-dim", args.dims, "cost_vs_dim"),
                               ("--sweep-size", args.sizes, "cost_vs_size")):
        code = main(["sweep", *common, flag, values, "--out", str(out / f"{name}.csv"),
                     "--markdown", str(out / f"{name}.md")])
        if code:
            return code
        print((out / f"{name}.md").read_text())
    return 0


if __name__ == "__main__":
    raise SystemExit(run())

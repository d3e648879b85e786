"""Command-line experiment runner.

Subcommands::

    generate   write a synthetic preset to libSVM files plus a manifest
    run        repeat one or more protocols over seeded trials
    compare    run every classification protocol and normalise costs to mwuemp
    sweep      cost against dimension or party size
    lp         MWU LP solver on an LP text file (monolithic or two-party)
    stream-lp  multipass streaming LP on the rows of an LP text file

Every option can also come from a JSON file given with ``--config``;
flags on the command line override it.  Exit codes: 0 on success, 2 for
configuration errors, 3 when a run fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .datagen import PRESETS, SyntheticSpec, generate, read_libsvm, read_manifest, write_libsvm, write_manifest
from .opt.lpio import LPFormatError, read_lp, write_results_csv
from .opt.mwu_lp import lp_binary_search, mwu_lp_solve, two_party_lp
from .opt.simplex import LinearProgram, LPError, simplex_solve
from .opt.streaming import PassBudgetExhausted, count_violations, multipass_lp_violate
from .protocols import PROTOCOLS, MwuConfig, make_parties
from .types import WeightedDataset

CLASSIFICATION_PROTOCOLS = ("naive", "voting", "rand", "randemp", "maxmarg", "mwu", "mwuemp", "kparty_mwu")
LP_PROTOCOLS = ("lp_mwu", "lp_twoparty")
ALL_PROTOCOLS = CLASSIFICATION_PROTOCOLS + LP_PROTOCOLS + ("stream_lp",)
COMPARE_PROTOCOLS = ("naive", "voting", "rand", "randemp", "maxmarg", "mwu", "mwuemp")
CSV_COLUMNS = ("dataset", "protocol", "k", "d", "epsilon", "trials", "acc_mean", "acc_std",
               "words_mean", "words_vs_mwuemp", "rounds_mean", "seed")
EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    protocol: list[str] = field(default_factory=lambda: ["mwuemp"])
    preset: str | None = None
    data: str | None = None
    epsilon: float = 0.05
    rho: float = 0.75
    c: float = 0.2
    sample_size: int = 100
    rounds: int | None = None
    parties: int | None = None
    trials: int = 10
    seed: int = 0
    out: str | None = None
    markdown: str | None = None
    sweep_dim: list[int] = field(default_factory=list)
    sweep_size: list[int] = field(default_factory=list)
    search: bool = False
    max_passes: int = 20

    def __post_init__(self):
        if isinstance(self.protocol, str):
            self.protocol = [p for p in self.protocol.split(",") if p]
        for p in self.protocol:
            if p not in ALL_PROTOCOLS:
                raise ConfigError(f"unknown protocol {p!r}; choose from {', '.join(ALL_PROTOCOLS)}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if self.parties is not None and self.parties < 1:
            raise ConfigError("parties must be positive")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {', '.join(PRESETS)}")
        for name in ("sweep_dim", "sweep_size"):
            values = getattr(self, name)
            if isinstance(values, str):
                try:
                    values = [int(v) for v in values.split(",") if v]
                except ValueError:
                    raise ConfigError(f"{name} must be comma-separated integers") from None
                setattr(self, name, values)
            if any(v <= 0 for v in values) or list(values) != sorted(set(values)):
                raise ConfigError(f"{name} values must be positive and increasing")

    def mwu_config(self, seed: int) -> MwuConfig:
        try:
            return MwuConfig(epsilon=self.epsilon, rho=self.rho, c=self.c,
                             sample_size_per_round=self.sample_size,
                             rounds_override=self.rounds, seed=seed)
        except ValueError as e:
            raise ConfigError(str(e)) from None


# ----------------------------------------------------------------- datasets


def preset_spec(name: str, parties: int | None, seed: int, **overrides) -> SyntheticSpec:
    spec = PRESETS[name]
    if parties is not None and parties != spec.k:
        overrides["k"] = parties
    if spec.mixture and ({"k", "d"} & overrides.keys()):
        raise ConfigError(f"preset {name!r} has a fixed mixture; its k and d cannot change")
    return replace(spec, seed=seed, **overrides)


def load_parties(path: str, parties: int | None, seed: int) -> list[WeightedDataset]:
    """Parties from a manifest (or a directory holding one), or a libSVM file split at random."""
    p = Path(path)
    if p.is_dir():
        p = p / "manifest.json"
    if not p.exists():
        raise ConfigError(f"dataset {path!r} not found")
    try:
        if p.suffix == ".json":
            spec, files = read_manifest(p)
            return [read_libsvm(p.parent / f, spec.d) for f in files]
        ds = read_libsvm(p)
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError(f"cannot read dataset {path!r}: {e}") from None
    k = parties or 2
    if len(ds) < k:
        raise ConfigError(f"dataset has {len(ds)} points, fewer than {k} parties")
    order = np.random.default_rng(seed).permutation(len(ds))
    return [ds.subset(np.sort(chunk)) for chunk in np.array_split(order, k)]


def trial_parties(cfg: ExperimentConfig, seed: int, **overrides):
    """(dataset label, party datasets) for one trial."""
    if cfg.data is not None:
        return Path(cfg.data).stem, load_parties(cfg.data, cfg.parties, seed)
    name = cfg.preset or "small"
    return name, generate(preset_spec(name, cfg.parties, seed, **overrides)).parties


# ------------------------------------------------------------- experiments


def _summarise(dataset, protocol, k, d, cfg, accs, words, rounds) -> dict:
    return {
        "dataset": dataset, "protocol": protocol, "k": k, "d": d, "epsilon": cfg.epsilon,
        "trials": cfg.trials, "acc_mean": float(np.mean(accs)), "acc_std": float(np.std(accs)),
        "words_mean": float(np.mean(words)), "words_vs_mwuemp": None,
        "rounds_mean": float(np.mean(rounds)), "seed": cfg.seed,
    }


def _normalise(rows: list[dict]) -> None:
    base = {}
    for r in rows:
        if r["protocol"] == "mwuemp":
            base[(r["dataset"], r.get("_sweep"))] = r["words_mean"]
    for r in rows:
        ref = base.get((r["dataset"], r.get("_sweep")))
        r["words_vs_mwuemp"] = r["words_mean"] / ref if ref else None


def run_experiment(cfg: ExperimentConfig, protocols=None, **overrides) -> list[dict]:
    """Mean accuracy, spread, words and rounds per protocol over ``cfg.trials`` trials.

    Trial ``t`` uses seed ``cfg.seed + t`` for both the data and the protocol.
    """
    protocols = list(protocols or cfg.protocol)
    for p in protocols:
        if p not in CLASSIFICATION_PROTOCOLS:
            raise ConfigError(f"protocol {p!r} is not a classification protocol")
    stats = {p: ([], [], []) for p in protocols}
    label, k, d = None, None, None
    for t in range(cfg.trials):
        seed = cfg.seed + t
        label, datasets = trial_parties(cfg, seed, **overrides)
        k, d = len(datasets), datasets[0].dimension
        if k < 2:
            raise ConfigError("protocols need at least two parties")
        parties = make_parties(datasets)
        mcfg = cfg.mwu_config(seed)
        for p in protocols:
            res = PROTOCOLS[p](parties, mcfg)
            accs, words, rounds = stats[p]
            accs.append(res.train_accuracy)
            words.append(res.words)
            rounds.append(res.rounds_used)
    rows = [_summarise(label, p, k, d, cfg, *stats[p]) for p in protocols]
    _normalise(rows)
    return sorted(rows, key=lambda r: (r["dataset"], r["protocol"]))


def compare_scaling(cfg: ExperimentConfig, protocols=None) -> list[dict]:
    """One row per (sweep value, protocol), sweeping dimension or party size."""
    if bool(cfg.sweep_dim) == bool(cfg.sweep_size):
        raise ConfigError("give exactly one of --sweep-dim and --sweep-size")
    if cfg.data is not None:
        raise ConfigError("sweeps generate their data; use --preset, not --data")
    key, values = ("d", cfg.sweep_dim) if cfg.sweep_dim else ("n_per_party", cfg.sweep_size)
    rows = []
    for v in values:
        for r in run_experiment(cfg, protocols, **{key: v}):
            r["dataset"] = f"{r['dataset']}[{key}={v}]"
            r["_sweep"] = (key, v)
            rows.append(r)
    _normalise(rows)
    return sorted(rows, key=lambda r: (r["_sweep"], r["protocol"]))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def format_csv(rows: list[dict], timestamp: str | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"# generated {timestamp or datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def format_markdown(rows: list[dict]) -> str:
    cols = ("dataset", "protocol", "acc_mean", "acc_std", "words_mean", "words_vs_mwuemp", "rounds_mean")
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r[c]
            if c.startswith("acc") and v is not None:
                cells.append(f"{100 * v:.2f}")
            elif c == "words_vs_mwuemp":
                cells.append("" if v is None else f"{v:.2f}")
            else:
                cells.append(_fmt(v) if not isinstance(v, float) else f"{v:.1f}")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_rows(rows, cfg: ExperimentConfig) -> None:
    _emit(format_csv(rows), cfg.out)
    if cfg.markdown:
        Path(cfg.markdown).write_text(format_markdown(rows))


# --------------------------------------------------------------- commands


def cmd_generate(cfg: ExperimentConfig) -> None:
    if not cfg.out:
        raise ConfigError("generate needs --out DIR")
    spec = preset_spec(cfg.preset or "small", cfg.parties, cfg.seed)
    data = generate(spec)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, ds in enumerate(data.parties, start=1):
        name = f"party{i}.libsvm"
        write_libsvm(ds, out / name)
        files.append(name)
    write_manifest(out / "manifest.json", spec, files)
    print(f"wrote {len(files)} party files and manifest.json to {out}")


def cmd_run(cfg: ExperimentConfig) -> None:
    _emit_rows(run_experiment(cfg), cfg)


def cmd_compare(cfg: ExperimentConfig) -> None:
    _emit_rows(run_experiment(cfg, COMPARE_PROTOCOLS), cfg)


def cmd_sweep(cfg: ExperimentConfig) -> None:
    protocols = [p for p in cfg.protocol if p in CLASSIFICATION_PROTOCOLS] or COMPARE_PROTOCOLS
    _emit_rows(compare_scaling(cfg, protocols), cfg)


def _load_lp(cfg: ExperimentConfig) -> LinearProgram:
    if not cfg.data:
        raise ConfigError("this command needs --data LPFILE")
    try:
        return read_lp(cfg.data)
    except (OSError, LPFormatError, ValueError) as e:
        raise ConfigError(f"cannot read LP {cfg.data!r}: {e}") from None


def cmd_lp(cfg: ExperimentConfig) -> None:
    if "stream_lp" in cfg.protocol:
        cmd_stream_lp(cfg)
        return
    lp = _load_lp(cfg)
    protocol = next((p for p in cfg.protocol if p in LP_PROTOCOLS), "lp_mwu")
    rows = []
    if cfg.search:
        res = lp_binary_search(lp, cfg.epsilon)
        rows.append((res.z, res.solution.iterations, res.solution.min_slack, 0))
    else:
        z = simplex_solve(lp).objective
        if protocol == "lp_twoparty":
            # player A keeps the box and objective, player B every row
            a_party = LinearProgram(np.zeros((0, lp.d)), np.zeros(0), lp.g, lp.lo, lp.hi)
            res, net = two_party_lp(a_party, lp.A, lp.b, z, cfg.epsilon)
            words = net.ledger.total_words
        else:
            res, words = mwu_lp_solve(lp, z, cfg.epsilon), 0
        rows.append((z, res.iterations, res.min_slack, words))
    if cfg.out:
        write_results_csv(cfg.out, rows)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(("z_guess", "iterations", "min_slack", "words"))
        w.writerows(rows)


def cmd_stream_lp(cfg: ExperimentConfig) -> None:
    lp = _load_lp(cfg)
    if not lp.box_is_finite:
        raise ConfigError("stream-lp needs a finite box")
    res = multipass_lp_violate(lp.A, lp.b, cfg.epsilon, seed=cfg.seed, players=cfg.parties or 1,
                               max_passes=cfg.max_passes, g=lp.g, lo=lp.lo, hi=lp.hi,
                               split_seed=cfg.seed)
    text = json.dumps({
        "x": res.x.tolist(), "passes": res.passes, "violations": res.violations,
        "checked_violations": count_violations(res.x, lp.A, lp.b), "n": lp.n,
        "store_words": res.store_words, "words": res.ledger.total_words,
    }, indent=2) + "\n"
    _emit(text, cfg.out)


COMMAND_HELP = {
    "generate": "write a synthetic preset as libSVM files plus a manifest",
    "run": "run protocols on one dataset and write a results CSV",
    "compare": "run every requested protocol over several trials and tabulate them",
    "sweep": "communication cost against dimension or points per party",
    "lp": "solve an LP file with the MWU solver, alone or split between two players",
    "stream-lp": "find a point violating few rows of an LP file with the multipass algorithm",
}

COMMANDS = {
    "generate": cmd_generate, "run": cmd_run, "compare": cmd_compare,
    "sweep": cmd_sweep, "lp": cmd_lp, "stream-lp": cmd_stream_lp,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distlearn", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=COMMAND_HELP[name], description=COMMAND_HELP[name])
        p.add_argument("--config", help="JSON file of options; flags override it")
        p.add_argument("--protocol", help="comma-separated protocol names")
        p.add_argument("--preset", help="synthetic preset name")
        p.add_argument("--data", help="manifest, libSVM file or LP file")
        p.add_argument("--epsilon", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--c", type=float)
        p.add_argument("--sample-size", type=int)
        p.add_argument("--rounds", type=int,
                       help="MWU rounds; default ceil(5 log2(1/epsilon)), 50 is the empirical choice")
        p.add_argument("--parties", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--markdown", help="also write a Markdown table here")
        p.add_argument("--sweep-dim", help="comma-separated dimensions")
        p.add_argument("--sweep-size", help="comma-separated points per party")
        p.add_argument("--max-passes", type=int)
        p.add_argument("--search", action="store_true", default=None,
                       help="lp: binary-search the objective instead of using the exact optimum")
    return parser


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config:
        try:
            values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config!r}: {e}") from None
        if not isinstance(values, dict):
            raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for name in known:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    try:
        return ExperimentConfig(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (LPError, PassBudgetExhausted, RuntimeError, ValueError, ArithmeticError) as e:
        print(f"run failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

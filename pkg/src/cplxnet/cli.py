"""Command-line entry point.

Subcommands: gen, convert-info, train, experiment, actmax, report.
Exit codes: 0 ok, 2 usage/config, 3 data format, 4 numeric failure.
The CPLX_SEED environment variable overrides the default seed of any
subcommand where --seed is not given explicitly.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import sys

import numpy as np

from . import dataio, siggen
from .actmax import ActMaxConfig, maximize, render_gallery
from .errors import ConfigError, ContractError, CplxError, DimensionError, \
    FormatError, NumericError
from .experiments import evaluate, load_trial, run_paradigm, write_report
from .models import ARCH_NAMES, Model, build, param_count, spec_for
from .nn import TrainConfig, train_model

EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_NUMERIC = 4


def _default_seed() -> int:
    return int(os.environ.get("CPLX_SEED", "0"))


def _echo_config(out_dir, args: argparse.Namespace):
    """Every run writes the effective configuration next to its outputs."""
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {k: (str(v) if isinstance(v, pathlib.Path) else v)
           for k, v in vars(args).items() if k != "func"}
    with open(out / "config.json", "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def _train_cfg(args) -> TrainConfig:
    return TrainConfig(epochs=args.epochs, batch_size=args.batch_size, lr=args.lr,
                       seed=args.seed, verbose=getattr(args, "verbose", False))


def _add_train_opts(p):
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=1024)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--verbose", action="store_true")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args):
    if args.count < 1:
        raise ConfigError("--count must be >= 1")
    ds = siggen.generate_dataset(args.count, args.seed)
    dataio.write_iqds(ds, args.out)
    print(f"wrote {len(ds)} frames ({len(ds.mod_names)} mods x "
          f"{len(ds.snr_values)} SNRs x {args.count}) to {args.out}")


def cmd_convert_info(args):
    ds = dataio.read_iqds(args.file)
    counts = {}
    for name in ds.mod_names:
        counts[name] = int(np.sum(ds.labels == ds.mod_names.index(name)))
    print(f"{args.file}: {len(ds)} frames")
    print("mods: " + ", ".join(f"{n}={c}" for n, c in counts.items()))
    print("snrs: " + ", ".join(str(s) for s in ds.snr_values))


def cmd_train(args):
    ds = dataio.read_iqds(args.data)
    if args.paradigm == "all":
        train = ds
        test = None
    else:
        train, test = dataio.split(ds, dataio.PARADIGMS[args.paradigm](args.seed))
    model = build(spec_for(args.arch), args.seed)
    print(f"{args.arch}: {model.num_params()} parameters "
          f"(spec count {param_count(model.spec)})")
    hist = train_model(model, train.samples, train.labels.astype(int), _train_cfg(args))
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _echo_config(out, args)
    model.save(out / f"{args.arch}.cplx")
    with open(out / "history.json", "w") as fh:
        json.dump({"train_loss": hist.train_loss, "val_loss": hist.val_loss,
                   "epochs_run": hist.epochs_run}, fh, indent=1)
    if test is not None:
        res = evaluate(model, test)
        print(f"test accuracy: {res.overall:.4f}")
        with open(out / "eval.json", "w") as fh:
            json.dump({"overall": res.overall,
                       "snr_accuracy": {str(k): v for k, v in res.snr_accuracy.items()}},
                      fh, indent=1)
    print(f"checkpoint saved to {out / (args.arch + '.cplx')}")


def cmd_experiment(args):
    if args.paradigm not in dataio.PARADIGMS:
        raise ConfigError(
            f"invalid paradigm {args.paradigm!r}; choose from "
            f"{{{', '.join(sorted(dataio.PARADIGMS))}}}"
        )
    ds = dataio.read_iqds(args.data)
    out = pathlib.Path(args.out)
    _echo_config(out, args)
    archs = args.archs.split(",") if args.archs else list(ARCH_NAMES)
    for a in archs:
        spec_for(a)

    def progress(arch, t, res):
        print(f"[{args.paradigm}] {arch} trial {t}: overall {res.overall:.4f} "
              f"({res.epochs_run} epochs)")

    try:
        results = run_paradigm(ds, args.paradigm, args.trials, args.seed,
                               _train_cfg(args), archs=archs, out_dir=out,
                               jobs=args.jobs, progress=progress)
    except CplxError:
        manifest = sorted(p.name for p in out.glob("trial_*.json"))
        with open(out / "partial_manifest.json", "w") as fh:
            json.dump({"complete": False, "trial_files": manifest}, fh, indent=1)
        raise
    summary = write_report(results, out, ds.mod_names)
    for arch, stats_ in summary["overall"].items():
        print(f"{arch}: mean overall {stats_['mean']:.4f} +- {stats_['std']:.4f}")
    for tt in summary["t_tests"]:
        print(f"t-test {tt['a_name']} vs {tt['b_name']}: "
              f"t={tt['t']:.4f} df={tt['df']} p={tt['p']:.4g}")


def cmd_actmax(args):
    if not pathlib.Path(args.checkpoint).exists():
        raise FormatError(f"checkpoint {args.checkpoint} does not exist")
    model = Model.load(args.checkpoint)
    cfg = ActMaxConfig(steps=args.steps, step_size=args.step_size,
                       l2_penalty=args.l2_penalty, seed=args.seed)
    ds = dataio.read_iqds(args.data)
    # reference frames: per class, a sample from the highest SNR present
    refs = {}
    for i in range(len(ds.mod_names)):
        mask = ds.labels == i
        if not mask.any():
            raise FormatError(f"dataset has no frames for class {ds.mod_names[i]}")
        top = ds.snrs[mask].max()
        idx = np.flatnonzero(mask & (ds.snrs == top))[0]
        refs[i] = ds.samples[idx]
    images = [maximize(model, c, cfg) for c in range(len(ds.mod_names))]
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _echo_config(out, args)
    render_gallery(images, refs, ds.mod_names, out / "gallery.svg",
                   out / "confidences.json")
    reached = sum(1 for im in images if im.reached_target)
    print(f"gallery written to {out / 'gallery.svg'}; "
          f"{reached}/{len(images)} classes reached target confidence")


def cmd_report(args):
    files = sorted(pathlib.Path(args.trials).glob("trial_*.json"))
    if not files:
        raise ConfigError(f"no trial_*.json files under {args.trials}")
    results = {}
    for f in files:
        res = load_trial(f)
        results.setdefault(res.arch, []).append(res)
    mod_names = args.mod_names.split(",") if args.mod_names else list(siggen.MOD_NAMES)
    out = pathlib.Path(args.out)
    _echo_config(out, args)
    write_report(results, out, mod_names)
    print(f"report written to {out}")


# ---------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cplxnet",
                                 description="complex-convolution modulation classification")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic IQDS dataset")
    p.add_argument("--count", type=int, required=True, help="frames per (mod, snr) cell")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("convert-info", help="validate an IQDS file and print a summary")
    p.add_argument("file")
    p.set_defaults(func=cmd_convert_info)

    p = sub.add_parser("train", help="train one architecture")
    p.add_argument("--data", required=True)
    p.add_argument("--arch", required=True, choices=ARCH_NAMES)
    p.add_argument("--paradigm", default="all",
                   choices=["all", "original", "exp1", "exp2"])
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    _add_train_opts(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("experiment", help="run a train/test paradigm with repeated trials")
    p.add_argument("--data", required=True)
    p.add_argument("--paradigm", required=True)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--archs", default="", help="comma list, default all three")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_train_opts(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("actmax", help="synthesize one-hot inputs from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="IQDS file for reference frames")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--step-size", type=float, default=0.05)
    p.add_argument("--l2-penalty", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_actmax)

    p = sub.add_parser("report", help="regenerate report assets from trial files")
    p.add_argument("--trials", required=True, help="directory of trial_*.json files")
    p.add_argument("--mod-names", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
        args.func(args)
    except (ConfigError, ContractError, DimensionError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as e:
        print(f"format error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Train/test paradigms, repeated trials, and significance reporting.

A paradigm run trains each architecture ``trials`` times; every trial gets
its own split AND its own weight initialization, both derived from the
base seed, and yields per-SNR accuracy plus per-SNR confusion counts.
Trial results serialize to self-describing JSON files; the report
generator consumes only those files.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import svgplot
from .dataio import PARADIGMS, Dataset, split
from .errors import ConfigError, ContractError
from .models import ARCH_NAMES, build, spec_for
from .nn import TrainConfig, train_model
from .stats import SignificanceReport, t_test_unpaired

__all__ = [
    "TrialResult",
    "evaluate",
    "run_trial",
    "run_paradigm",
    "accuracy_by_snr",
    "mean_confusion",
    "compare_architectures",
    "save_trial",
    "load_trial",
    "write_report",
]


@dataclass
class TrialResult:
    arch: str
    seed: int
    paradigm: str
    snr_accuracy: dict                 # snr (int) -> accuracy
    confusion: dict = field(repr=False)  # snr (int) -> (K, K) int array
    overall: float = 0.0
    epochs_run: int = 0

    @property
    def total_confusion(self) -> np.ndarray:
        return np.sum(list(self.confusion.values()), axis=0)


def evaluate(model, test: Dataset) -> TrialResult:
    """Per-SNR accuracy and confusion counts of ``model`` on ``test``."""
    pred = model.predict(test.samples)
    k = len(test.mod_names)
    snr_acc, conf = {}, {}
    for snr in sorted(set(int(s) for s in np.unique(test.snrs))):
        mask = test.snrs == snr
        c = np.zeros((k, k), np.int64)
        np.add.at(c, (test.labels[mask].astype(int), pred[mask]), 1)
        conf[snr] = c
        snr_acc[snr] = float(np.trace(c) / max(1, c.sum()))
    total = np.sum(list(conf.values()), axis=0)
    overall = float(np.trace(total) / total.sum())
    return TrialResult("", 0, "", snr_acc, conf, overall)


def _trial_seed(base_seed: int, arch: str, trial: int) -> int:
    return int(np.random.SeedSequence(
        [base_seed, ARCH_NAMES.index(arch), trial]
    ).generate_state(1)[0])


def run_trial(dataset: Dataset, paradigm: str, arch: str, seed: int,
              train_cfg: TrainConfig) -> TrialResult:
    if paradigm not in PARADIGMS:
        raise ConfigError(
            f"unknown paradigm {paradigm!r}; expected one of {sorted(PARADIGMS)}"
        )
    train, test = split(dataset, PARADIGMS[paradigm](seed))
    model = build(spec_for(arch), seed)
    cfg = TrainConfig(**{**train_cfg.__dict__, "seed": seed})
    hist = train_model(model, train.samples, train.labels.astype(int), cfg)
    res = evaluate(model, test)
    res.arch, res.seed, res.paradigm = arch, seed, paradigm
    res.epochs_run = hist.epochs_run
    return res


def run_paradigm(dataset: Dataset, paradigm: str, trials: int, base_seed: int,
                 train_cfg: TrainConfig | None = None, archs=ARCH_NAMES,
                 out_dir=None, jobs: int = 1, progress=None):
    """All architectures x trials; returns {arch: [TrialResult, ...]}."""
    train_cfg = train_cfg or TrainConfig()
    tasks = [(arch, t, _trial_seed(base_seed, arch, t))
             for arch in archs for t in range(trials)]
    results = {arch: [None] * trials for arch in archs}

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {
                pool.submit(run_trial, dataset, paradigm, arch, seed, train_cfg): (arch, t)
                for arch, t, seed in tasks
            }
            for fut, (arch, t) in futs.items():
                results[arch][t] = fut.result()
                if progress:
                    progress(arch, t, results[arch][t])
    else:
        for arch, t, seed in tasks:
            results[arch][t] = run_trial(dataset, paradigm, arch, seed, train_cfg)
            if progress:
                progress(arch, t, results[arch][t])

    if out_dir is not None:
        import pathlib

        out = pathlib.Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for arch in archs:
            for t, res in enumerate(results[arch]):
                save_trial(res, out / f"trial_{arch}_{t}.json")
    return results


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

def accuracy_by_snr(results):
    """[TrialResult] -> (snrs, mean accuracy, std over trials)."""
    snrs = sorted(results[0].snr_accuracy)
    acc = np.array([[r.snr_accuracy[s] for s in snrs] for r in results])
    return snrs, acc.mean(axis=0), acc.std(axis=0, ddof=1) if len(results) > 1 \
        else np.zeros(len(snrs))


def mean_confusion(results) -> np.ndarray:
    """Row-normalized confusion averaged over trials and SNRs."""
    if not results:
        raise ContractError("mean_confusion needs at least one trial result")
    mats = []
    for r in results:
        for c in r.confusion.values():
            c = np.asarray(c, np.float64)
            rows = c.sum(axis=1, keepdims=True)
            mats.append(np.divide(c, rows, out=np.zeros_like(c), where=rows > 0))
    return np.mean(mats, axis=0)


def compare_architectures(results) -> list[SignificanceReport]:
    """Pairwise pooled t-tests on per-trial overall accuracies."""
    archs = list(results)
    reports = []
    for i in range(len(archs)):
        for j in range(i + 1, len(archs)):
            a, b = archs[i], archs[j]
            reports.append(t_test_unpaired(
                [r.overall for r in results[a]],
                [r.overall for r in results[b]],
                a_name=a, b_name=b,
            ))
    return reports


# ---------------------------------------------------------------------------
# serialization / report
# ---------------------------------------------------------------------------

def save_trial(res: TrialResult, path):
    doc = {
        "kind": "cplxnet-trial",
        "version": 1,
        "arch": res.arch,
        "seed": res.seed,
        "paradigm": res.paradigm,
        "overall": res.overall,
        "epochs_run": res.epochs_run,
        "snr_accuracy": {str(k): v for k, v in res.snr_accuracy.items()},
        "confusion": {str(k): np.asarray(v).tolist() for k, v in res.confusion.items()},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def load_trial(path) -> TrialResult:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("kind") != "cplxnet-trial":
        raise ConfigError(f"{path} is not a trial file")
    return TrialResult(
        arch=doc["arch"], seed=doc["seed"], paradigm=doc["paradigm"],
        snr_accuracy={int(k): v for k, v in doc["snr_accuracy"].items()},
        confusion={int(k): np.asarray(v, np.int64) for k, v in doc["confusion"].items()},
        overall=doc["overall"], epochs_run=doc.get("epochs_run", 0),
    )


def write_report(results, out_dir, mod_names):
    """Accuracy curves, confusion heatmaps, significance table and summary."""
    import pathlib

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    series = []
    for arch, rs in results.items():
        snrs, mean, std = accuracy_by_snr(rs)
        series.append((arch, snrs, mean, std))
    svgplot.line_chart(out / "accuracy_vs_snr.svg", series,
                       title="Classification accuracy vs SNR",
                       xlabel="SNR (dB)", ylabel="accuracy", ylim=(0.0, 1.0))

    for arch, rs in results.items():
        svgplot.heatmap(out / f"confusion_{arch}.svg", mean_confusion(rs),
                        mod_names, title=f"{arch}: mean confusion")

    reports = compare_architectures(results) if len(results) > 1 else []
    summary = {
        "kind": "cplxnet-report",
        "overall": {
            arch: {
                "mean": float(np.mean([r.overall for r in rs])),
                "std": float(np.std([r.overall for r in rs], ddof=1)) if len(rs) > 1 else 0.0,
                "trials": [r.overall for r in rs],
            }
            for arch, rs in results.items()
        },
        "t_tests": [r.__dict__ for r in reports],
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)

    lines = ["arch\tsnr_db\tmean_accuracy\tstd"]
    for arch, snrs, mean, std in series:
        for s, m, sd in zip(snrs, mean, std):
            lines.append(f"{arch}\t{s}\t{m:.4f}\t{sd:.4f}")
    (out / "accuracy_table.tsv").write_text("\n".join(lines) + "\n")
    return summary

"""Dataset generation, train/test split, SVM runs and grid search."""
from __future__ import annotations

from dataclasses import dataclass, replace
import json

import numpy as np

from ..errors import DomainError
from ..fock import EXPERIMENT_POLICY, TruncationPolicy
from ..kernels import KernelSpec, gram_cross, gram_exact
from ..measure import DisplacementPair, label_points
from .metrics import Metrics, evaluate
from .svm import SvmModel, smo_train, svm_predict

DEFAULT_SIZE = 2000
TRAIN_FRACTION = 0.7


@dataclass
class Dataset:
    points: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __len__(self) -> int:
        return len(self.labels)

    def subset(self, idx) -> "Dataset":
        return Dataset(self.points[idx], self.labels[idx], self.name)


def uniform_points(n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise DomainError("n must be >= 1")
    return np.random.default_rng(seed).random((n, 2))


def make_dataset(
    pair: DisplacementPair,
    n: int = DEFAULT_SIZE,
    seed: int = 0,
    alpha0: complex = 1.0,
    r0: float = 0.0,
    policy: TruncationPolicy = EXPERIMENT_POLICY,
) -> Dataset:
    pts = uniform_points(n, seed)
    return Dataset(pts, label_points(pts, pair, alpha0, r0, policy), pair.name)


def split_indices(n: int, seed: int, train_fraction: float = TRAIN_FRACTION) -> tuple[np.ndarray, np.ndarray]:
    if not 0 < train_fraction < 1:
        raise DomainError("train fraction must lie in (0, 1)")
    perm = np.random.default_rng(seed).permutation(n)
    cut = int(round(train_fraction * n))
    return np.sort(perm[:cut]), np.sort(perm[cut:])


@dataclass
class RunResult:
    metrics: Metrics
    model: SvmModel
    spec: KernelSpec
    report: dict


def _report(dataset: Dataset, spec: KernelSpec, C: float, metrics: Metrics, model: SvmModel, seed: int) -> dict:
    a0 = complex(spec.alpha0)
    return {
        "set_name": dataset.name,
        "set_size": len(dataset),
        "C": C,
        "gamma": spec.gamma_rbf if spec.kind == "rbf" else None,
        "accuracy": metrics.accuracy,
        "precision": metrics.precision,
        "recall": metrics.recall,
        "f1": metrics.f1,
        "confusion": [list(r) for r in metrics.confusion],
        "n_support": model.n_support,
        "seed": seed,
        "kernel_kind": spec.kind,
        "cutoff": spec.policy.cutoff,
        "alpha0": a0.real if a0.imag == 0 else [a0.real, a0.imag],
        "r0": spec.r0,
    }


def _check_two_classes(labels) -> None:
    if np.unique(labels).size < 2:
        raise DomainError("training split contains a single class")


def run_experiment(
    dataset: Dataset,
    spec: KernelSpec = KernelSpec(),
    C: float = 1.0,
    seed: int = 0,
    train_fraction: float = TRAIN_FRACTION,
    tol: float = 1e-3,
    require_two_classes: bool = False,
) -> RunResult:
    tr, te = split_indices(len(dataset), seed, train_fraction)
    train, test = dataset.subset(tr), dataset.subset(te)
    if require_two_classes:
        _check_two_classes(train.labels)
    spec = spec.resolved(train.points)
    K = gram_exact(train.points, spec)
    model = smo_train(K, train.labels, C, tol, kernel=spec, points=train.points)
    pred = svm_predict(model, gram_cross(test.points, train.points, spec))
    metrics = evaluate(pred, test.labels)
    return RunResult(metrics, model, spec, _report(dataset, spec, C, metrics, model, seed))


def rbf_baseline_run(
    dataset: Dataset, C: float = 1.0, gamma_spec: float | str = "scale", seed: int = 0,
    train_fraction: float = TRAIN_FRACTION,
) -> Metrics:
    spec = KernelSpec("rbf", gamma_rbf=gamma_spec)
    return run_experiment(dataset, spec, C, seed, train_fraction).metrics


def predict_points(model: SvmModel, points) -> np.ndarray:
    if model.kernel is None or model.support_points is None:
        raise DomainError("model lacks the kernel or support points needed for prediction")
    cross = gram_cross(np.asarray(points, float), model.support_points, model.kernel)
    return svm_predict(model, cross)


def decision_mesh(model: SvmModel, step: float = 0.02) -> list[tuple[float, float, int]]:
    """Predicted labels on a mesh over the unit square."""
    ticks = np.arange(0.0, 1.0 + step / 2, step)
    ticks = np.clip(ticks, 0.0, 1.0)
    g1, g2 = np.meshgrid(ticks, ticks, indexing="ij")
    pts = np.column_stack([g1.ravel(), g2.ravel()])
    labels = predict_points(model, pts)
    return [(float(a), float(b), int(c)) for (a, b), c in zip(pts, labels)]


def grid_search(
    dataset: Dataset,
    C_grid,
    gamma_grid=("scale",),
    kind: str = "rbf",
    seed: int = 0,
    alpha0: complex = 1.0,
    r0: float = 0.0,
    policy: TruncationPolicy = EXPERIMENT_POLICY,
    train_fraction: float = TRAIN_FRACTION,
) -> tuple[float, float | str | None, Metrics]:
    """Exhaustive search on a fixed split; ties go to smaller C, then smaller gamma."""
    C_grid, gamma_grid = list(C_grid), list(gamma_grid)
    if not C_grid or not gamma_grid:
        raise DomainError("grids must be nonempty")
    tr, te = split_indices(len(dataset), seed, train_fraction)
    train, test = dataset.subset(tr), dataset.subset(te)
    base = KernelSpec(kind, alpha0, r0, policy=policy)
    gammas = gamma_grid if kind == "rbf" else [None]

    def gamma_key(g):
        if g is None:
            return 0.0
        return base.resolved(train.points).gamma_rbf if g == "scale" else float(g)

    best = None
    for g in sorted(gammas, key=gamma_key):
        spec = (replace(base, gamma_rbf=g) if g is not None else base).resolved(train.points)
        K = gram_exact(train.points, spec)
        Kx = gram_cross(test.points, train.points, spec)
        for C in sorted(C_grid):
            model = smo_train(K, train.labels, C, kernel=spec, check_psd=False)
            m = evaluate(svm_predict(model, Kx), test.labels)
            cand = (m.accuracy, -C, -gamma_key(g))
            if best is None or cand > best[0]:
                best = (cand, C, g, m)
    return best[1], best[2], best[3]


def write_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")

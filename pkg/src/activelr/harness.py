"""Training loop joining objectives, backbones, and step-size adaptation.

One run produces a :class:`Trajectory`: per-iteration records (sampled
every ``record_every`` steps), one record per epoch boundary, and a final
summary.  Runs are deterministic given the config, truncate gracefully on
divergence instead of raising, and can stop early once an objective's
escape predicate fires.

Trajectories serialize to JSONL (full fidelity) or CSV (iteration rows
only, for plotting; metadata and the final summary travel in comment
lines).  Both formats round-trip and are byte-identical across repeated
identical runs.
"""

import json
import math
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from .core import (ActiveConfig, DivergenceError, accumulate, effective_alphas,
                   end_epoch, init_active)
from .backbones import (ADABELIEF, ADAMW, RADAM, SGD_MOMENTUM, BackboneConfig,
                        init_backbone, step, vanilla_alphas)
from .objectives import Objective, minibatch_split

# Truncation threshold: a loss whose magnitude exceeds this multiple of
# (1 + |initial loss|) is treated as divergence.
DIVERGENCE_LOSS_FACTOR = 1e6

# Parameter vectors up to this length are stored in records by default.
PARAM_RECORD_MAX = 8

# Step-size grid for sensitivity sweeps: 5 * 10^n for integer n in [-7, -3].
LR_GRID = tuple(5.0 * 10.0 ** n for n in range(-7, -2))

# Batch-size grid; None means full batch.
BATCH_GRID = (8, 32, 128, None)


@dataclass
class RunConfig:
    """Everything a training run depends on besides the objective.

    ``alpha`` is the constant step size of a vanilla run and the base
    step size alpha0 of an active one.  ``steps_per_epoch`` applies only
    to analytic objectives without batch structure, where an epoch is
    that many full-gradient steps.  ``batch_size=None`` means full batch.
    """

    alpha: float = 1e-3
    backbone: BackboneConfig = field(default_factory=BackboneConfig)
    active: bool = False
    active_cfg: ActiveConfig = None
    epochs: int = 100
    steps_per_epoch: int = 1
    batch_size: int = None
    seed: int = 0
    shuffle: bool = True
    theta0: np.ndarray = None
    record_every: int = 1
    record_params: bool = None
    loss_target: float = None
    stop_when_escaped: bool = False
    divergence_loss_factor: float = DIVERGENCE_LOSS_FACTOR

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        for name in ("epochs", "steps_per_epoch", "record_every"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")

    def resolved_active_cfg(self) -> ActiveConfig:
        if self.active_cfg is not None:
            return self.active_cfg
        return ActiveConfig(alpha0=self.alpha)


@dataclass
class IterationRecord:
    """State just before one inner-loop step."""

    epoch: int
    step: int
    loss: float
    alpha_min: float
    alpha_mean: float
    alpha_max: float
    params: list = None
    grad_norms: list = None


@dataclass
class EpochRecord:
    """Full-objective loss at the boundary and the adaptation outcome.

    Alpha stats are taken after the boundary update, i.e. the step sizes
    the next epoch will run with.
    """

    epoch: int
    loss: float
    alpha_min: float
    alpha_mean: float
    alpha_max: float
    grown: int = 0
    shrunk: int = 0


@dataclass
class Trajectory:
    meta: dict
    iterations: list
    epoch_records: list
    final: dict

    @property
    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.iterations])

    @property
    def epoch_losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.epoch_records])

    @property
    def alpha_means(self) -> np.ndarray:
        return np.array([r.alpha_mean for r in self.epoch_records])

    @property
    def diverged(self) -> bool:
        return bool(self.final.get("diverged", False))

    @property
    def escaped(self) -> bool:
        return bool(self.final.get("escaped", False))


class TrajectoryParseError(ValueError):
    """Raised when a trajectory file is malformed; names the bad line."""


def _resolve_theta0(obj, cfg):
    if cfg.theta0 is not None:
        return np.array(cfg.theta0, dtype=np.float64)
    if obj.default_init is not None:
        return np.array(obj.default_init, dtype=np.float64)
    if hasattr(obj, "init_params"):
        return np.asarray(obj.init_params(), dtype=np.float64)
    raise ValueError(f"objective {obj.name!r} has no default init; pass theta0")


def _epoch_plan(obj, cfg, epoch):
    """List of batch specs for one epoch: ('pair', (f_t, g_t)),
    ('idx', indices) or ('full', None)."""
    if obj.batches:
        order = np.arange(len(obj.batches))
        if cfg.shuffle:
            order = np.random.default_rng((cfg.seed, epoch)).permutation(order)
        return [("pair", obj.batches[i]) for i in order]
    if hasattr(obj, "batch_loss_grad"):
        bs = cfg.batch_size if cfg.batch_size is not None else obj.n_samples
        splits = minibatch_split(obj.n_samples, min(bs, obj.n_samples),
                                 seed=(cfg.seed, epoch), shuffle=cfg.shuffle)
        return [("idx", idx) for idx in splits]
    return [("full", None)] * cfg.steps_per_epoch


def run_training(obj: Objective, cfg: RunConfig) -> Trajectory:
    """Run the outer/inner loop and record the trajectory.

    Non-finite losses, gradients, or parameters truncate the run with
    ``final["diverged"] = True`` rather than raising, as does a loss
    whose magnitude outgrows the initial one by ``divergence_loss_factor``.
    """
    if cfg.steps_per_epoch > 1 and (obj.batches or hasattr(obj, "batch_loss_grad")):
        raise ValueError("steps_per_epoch applies only to objectives without batches")

    theta = _resolve_theta0(obj, cfg)
    n = theta.shape[0]
    if n != obj.dim:
        raise ValueError(f"theta0 has {n} components, objective needs {obj.dim}")

    backbone_state = init_backbone(n)
    active_cfg = cfg.resolved_active_cfg() if cfg.active else None
    if cfg.active:
        active_state = init_active(active_cfg, n)
        alphas = effective_alphas(active_state, active_cfg)
    else:
        active_state = None
        alphas = vanilla_alphas(cfg.alpha, n)

    record_params = cfg.record_params
    if record_params is None:
        record_params = n <= PARAM_RECORD_MAX

    initial_loss = float(obj.f(theta))
    loss_cap = cfg.divergence_loss_factor * (1.0 + abs(initial_loss))

    meta = {
        "objective": obj.name,
        "dim": int(n),
        "backbone": cfg.backbone.kind,
        "weight_decay": float(cfg.backbone.weight_decay),
        "active": bool(cfg.active),
        "alpha": float(cfg.alpha),
        "epochs": int(cfg.epochs),
        "steps_per_epoch": int(cfg.steps_per_epoch),
        "batch_size": None if cfg.batch_size is None else int(cfg.batch_size),
        "seed": int(cfg.seed),
        "record_every": int(cfg.record_every),
    }
    if cfg.active:
        meta.update({
            "alpha_high": float(active_cfg.alpha_high),
            "alpha_low": float(active_cfg.alpha_low),
            "adapt_mode": active_cfg.mode,
            "first_epoch_policy": active_cfg.first_epoch_policy,
        })

    iterations = []
    epoch_records = []
    best_loss = initial_loss
    diverged = False
    escaped = False
    escape_epoch = None
    epochs_to_target = None
    step_idx = 0
    epochs_run = 0
    stop = False

    if obj.escape is not None and obj.escape(theta):
        escaped = True
        escape_epoch = 0

    for epoch in range(cfg.epochs):
        if stop:
            break
        for kind, payload in _epoch_plan(obj, cfg, epoch):
            recording = step_idx % cfg.record_every == 0
            grad_norms = None
            if kind == "pair":
                f_t, g_t = payload
                g = g_t(theta)
                loss = float(f_t(theta)) if recording else None
            elif kind == "idx":
                loss, g, grad_norms = obj.batch_loss_grad(theta, payload)
                loss = float(loss)
            else:
                g = obj.grad(theta)
                loss = float(obj.f(theta)) if recording else None

            if loss is not None and (not math.isfinite(loss) or abs(loss) > loss_cap):
                diverged = True
                stop = True
                break
            if loss is not None and loss < best_loss:
                best_loss = loss

            if recording:
                iterations.append(IterationRecord(
                    epoch=epoch,
                    step=step_idx,
                    loss=loss,
                    alpha_min=float(alphas.min()),
                    alpha_mean=float(alphas.mean()),
                    alpha_max=float(alphas.max()),
                    params=[float(v) for v in theta] if record_params else None,
                    grad_norms=(None if grad_norms is None
                                else [float(v) for v in grad_norms]),
                ))

            try:
                if cfg.active:
                    accumulate(active_state, g)
                step(theta, g, alphas, backbone_state, cfg.backbone)
            except DivergenceError:
                diverged = True
                stop = True
                break
            step_idx += 1

            if obj.escape is not None and not escaped and obj.escape(theta):
                escaped = True
                escape_epoch = epoch
            if escaped and cfg.stop_when_escaped:
                stop = True
                break

        if stop:
            break

        epoch_loss = float(obj.f(theta))
        if not math.isfinite(epoch_loss) or abs(epoch_loss) > loss_cap:
            diverged = True
            break
        if epoch_loss < best_loss:
            best_loss = epoch_loss
        if (cfg.loss_target is not None and epochs_to_target is None
                and epoch_loss <= cfg.loss_target):
            epochs_to_target = epoch + 1

        grown = shrunk = 0
        if cfg.active:
            report = end_epoch(active_state, active_cfg)
            alphas = effective_alphas(active_state, active_cfg)
            grown, shrunk = report.grown, report.shrunk
        epoch_records.append(EpochRecord(
            epoch=epoch,
            loss=epoch_loss,
            alpha_min=float(alphas.min()),
            alpha_mean=float(alphas.mean()),
            alpha_max=float(alphas.max()),
            grown=grown,
            shrunk=shrunk,
        ))
        epochs_run = epoch + 1

    final_loss = None
    if not diverged and np.all(np.isfinite(theta)):
        final_loss = float(obj.f(theta))
        if not math.isfinite(final_loss):
            final_loss = None
    final = {
        "initial_loss": initial_loss,
        "final_loss": final_loss,
        "best_loss": float(best_loss),
        "diverged": bool(diverged),
        "escaped": bool(escaped),
        "escape_epoch": escape_epoch,
        "epochs_run": int(epochs_run),
        "steps_run": int(step_idx),
        "epochs_to_target": epochs_to_target,
        "alpha_min": float(alphas.min()),
        "alpha_mean": float(alphas.mean()),
        "alpha_max": float(alphas.max()),
        "final_params": [float(v) for v in theta] if record_params else None,
    }
    if hasattr(obj, "accuracy") and not diverged:
        acc = obj.accuracy(theta)
        if acc is not None:
            final["final_accuracy"] = float(acc)

    return Trajectory(meta=meta, iterations=iterations,
                      epoch_records=epoch_records, final=final)


def _merged_lines(traj: Trajectory):
    """Chronological record stream: meta, iter/epoch interleaved, final."""
    yield {"kind": "meta", **traj.meta}
    it = 0
    for ep in traj.epoch_records:
        while it < len(traj.iterations) and traj.iterations[it].epoch <= ep.epoch:
            yield {"kind": "iter", **asdict(traj.iterations[it])}
            it += 1
        yield {"kind": "epoch", **asdict(ep)}
    while it < len(traj.iterations):
        yield {"kind": "iter", **asdict(traj.iterations[it])}
        it += 1
    yield {"kind": "final", **traj.final}


def write_trajectory(traj: Trajectory, path) -> None:
    """Write JSONL or CSV depending on the file extension."""
    path = str(path)
    if path.endswith(".jsonl"):
        with open(path, "w") as fh:
            for record in _merged_lines(traj):
                fh.write(json.dumps(record) + "\n")
    elif path.endswith(".csv"):
        _write_csv(traj, path)
    else:
        raise ValueError(f"unsupported trajectory extension: {path!r} "
                         "(use .jsonl or .csv)")


def read_trajectory(path) -> Trajectory:
    path = str(path)
    if path.endswith(".jsonl"):
        return _read_jsonl(path)
    if path.endswith(".csv"):
        return _read_csv(path)
    raise ValueError(f"unsupported trajectory extension: {path!r} "
                     "(use .jsonl or .csv)")


def _read_jsonl(path) -> Trajectory:
    meta = None
    final = {}
    iterations = []
    epoch_records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TrajectoryParseError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            kind = record.pop("kind", None)
            if kind == "meta":
                meta = record
            elif kind == "iter":
                try:
                    iterations.append(IterationRecord(**record))
                except TypeError as exc:
                    raise TrajectoryParseError(
                        f"{path}:{lineno}: bad iteration record: {exc}") from exc
            elif kind == "epoch":
                try:
                    epoch_records.append(EpochRecord(**record))
                except TypeError as exc:
                    raise TrajectoryParseError(
                        f"{path}:{lineno}: bad epoch record: {exc}") from exc
            elif kind == "final":
                final = record
            else:
                raise TrajectoryParseError(
                    f"{path}:{lineno}: unknown record kind {kind!r}")
    if meta is None:
        raise TrajectoryParseError(f"{path}: no meta record found")
    return Trajectory(meta=meta, iterations=iterations,
                      epoch_records=epoch_records, final=final)


def _fmt_float(x) -> str:
    return "%.17g" % x


def _write_csv(traj: Trajectory, path) -> None:
    first = traj.iterations[0] if traj.iterations else None
    n_params = len(first.params) if first is not None and first.params else 0
    n_norms = len(first.grad_norms) if first is not None and first.grad_norms else 0
    header = ["epoch", "step", "loss", "alpha_min", "alpha_mean", "alpha_max"]
    header += [f"param_{i}" for i in range(n_params)]
    header += [f"grad_norm_{i}" for i in range(n_norms)]
    with open(path, "w") as fh:
        fh.write("# meta: " + json.dumps(traj.meta) + "\n")
        fh.write(",".join(header) + "\n")
        for r in traj.iterations:
            row = [str(r.epoch), str(r.step), _fmt_float(r.loss),
                   _fmt_float(r.alpha_min), _fmt_float(r.alpha_mean),
                   _fmt_float(r.alpha_max)]
            row += [_fmt_float(v) for v in (r.params or [])]
            row += [_fmt_float(v) for v in (r.grad_norms or [])]
            if len(row) != len(header):
                raise ValueError(
                    f"inconsistent record width at step {r.step}: "
                    f"{len(row)} fields, header has {len(header)}")
            fh.write(",".join(row) + "\n")
        # Epoch summaries ride along as comments so the format stays a
        # plain plotting CSV while still round-tripping completely.
        for ep in traj.epoch_records:
            fh.write("# epoch: " + json.dumps(asdict(ep)) + "\n")
        fh.write("# final: " + json.dumps(traj.final) + "\n")


def _read_csv(path) -> Trajectory:
    meta = None
    final = {}
    iterations = []
    epoch_records = []
    header = None
    n_params = n_norms = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                for tag in ("meta:", "epoch:", "final:"):
                    if body.startswith(tag):
                        try:
                            payload = json.loads(body[len(tag):])
                        except json.JSONDecodeError as exc:
                            raise TrajectoryParseError(
                                f"{path}:{lineno}: bad JSON in comment: {exc}") from exc
                        if tag == "meta:":
                            meta = payload
                        elif tag == "epoch:":
                            try:
                                epoch_records.append(EpochRecord(**payload))
                            except TypeError as exc:
                                raise TrajectoryParseError(
                                    f"{path}:{lineno}: bad epoch record: {exc}"
                                ) from exc
                        else:
                            final = payload
                continue
            cells = line.split(",")
            if header is None:
                header = cells
                n_params = sum(c.startswith("param_") for c in header)
                n_norms = sum(c.startswith("grad_norm_") for c in header)
                expected = ["epoch", "step", "loss", "alpha_min", "alpha_mean",
                            "alpha_max"]
                if header[:6] != expected:
                    raise TrajectoryParseError(
                        f"{path}:{lineno}: bad header, expected it to start "
                        f"with {','.join(expected)}")
                continue
            if len(cells) != len(header):
                raise TrajectoryParseError(
                    f"{path}:{lineno}: expected {len(header)} fields, "
                    f"got {len(cells)}")
            try:
                epoch, stp = int(cells[0]), int(cells[1])
                floats = [float(c) for c in cells[2:]]
            except ValueError as exc:
                raise TrajectoryParseError(
                    f"{path}:{lineno}: bad numeric field: {exc}") from exc
            params = floats[4:4 + n_params] if n_params else None
            norms = floats[4 + n_params:4 + n_params + n_norms] if n_norms else None
            iterations.append(IterationRecord(
                epoch=epoch, step=stp, loss=floats[0], alpha_min=floats[1],
                alpha_mean=floats[2], alpha_max=floats[3],
                params=params, grad_norms=norms))
    if meta is None:
        raise TrajectoryParseError(f"{path}: no meta comment found")
    return Trajectory(meta=meta, iterations=iterations,
                      epoch_records=epoch_records, final=final)


@dataclass
class SweepCell:
    """One grid point: a (step size or batch size) x backbone x variant cell.

    ``mean``/``std`` aggregate the metric over the seeds that finished;
    a cell where any seed diverged is excluded from spread calculations.
    """

    key: object
    backbone: str
    active: bool
    metric: str
    values: list
    mean: float
    std: float
    n_seeds: int
    n_diverged: int

    @property
    def diverged(self) -> bool:
        return self.n_diverged > 0

    def to_json(self):
        return asdict(self)


@dataclass
class SweepReport:
    kind: str
    metric: str
    cells: list

    def cell(self, key, backbone, active) -> SweepCell:
        for c in self.cells:
            if c.key == key and c.backbone == backbone and c.active == active:
                return c
        raise KeyError((key, backbone, active))

    def spread(self, backbone, active) -> float:
        """Max minus min cell mean over non-divergent cells of one variant.

        A single surviving cell spreads 0; None when every cell diverged.
        """
        means = [c.mean for c in self.cells
                 if c.backbone == backbone and c.active == active
                 and not c.diverged and c.mean is not None]
        if not means:
            return None
        return float(max(means) - min(means))

    def to_json(self):
        return {"kind": self.kind, "metric": self.metric,
                "cells": [c.to_json() for c in self.cells]}


def save_sweep(report: SweepReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_json(), fh, indent=2)
        fh.write("\n")


def _metric_value(traj: Trajectory, metric: str):
    if traj.diverged:
        return None
    value = traj.final.get(metric)
    return None if value is None else float(value)


def _run_cells(kind, obj_factory, base_cfg, keys, cfg_for_key, backbones, seeds,
               active_variants, metric) -> SweepReport:
    seeds = list(seeds)
    keys = list(dict.fromkeys(keys))  # drop duplicate grid entries, keep order
    cells = []
    for backbone_kind in backbones:
        for active in active_variants:
            for key in keys:
                values = []
                n_div = 0
                for seed in seeds:
                    obj = obj_factory(seed)
                    cfg = cfg_for_key(base_cfg, key)
                    cfg = replace(
                        cfg,
                        backbone=replace(cfg.backbone, kind=backbone_kind),
                        active=active,
                        seed=seed,
                    )
                    traj = run_training(obj, cfg)
                    value = _metric_value(traj, metric)
                    if value is None:
                        n_div += 1
                    else:
                        values.append(value)
                mean = float(np.mean(values)) if values else None
                std = float(np.std(values)) if values else None
                cells.append(SweepCell(
                    key=key, backbone=backbone_kind, active=active,
                    metric=metric, values=values, mean=mean, std=std,
                    n_seeds=len(seeds), n_diverged=n_div))
    return SweepReport(kind=kind, metric=metric, cells=cells)


def lr_sensitivity_sweep(obj_factory, base_cfg: RunConfig, alphas=LR_GRID,
                         backbones=(SGD_MOMENTUM, ADAMW, RADAM, ADABELIEF),
                         seeds=range(3), active_variants=(False, True),
                         metric="final_loss") -> SweepReport:
    """Grid over base step sizes, for each backbone, vanilla and active.

    ``obj_factory(seed)`` must build a fresh objective; seed-dependent
    initialization belongs there, while the run seed controls shuffling.
    """
    def cfg_for_key(cfg, alpha):
        return replace(cfg, alpha=float(alpha), active_cfg=None)

    return _run_cells("lr", obj_factory, base_cfg, list(alphas), cfg_for_key,
                      backbones, seeds, active_variants, metric)


def batch_size_sweep(obj_factory, base_cfg: RunConfig, batch_sizes=BATCH_GRID,
                     backbones=(ADAMW,), seeds=range(3),
                     active_variants=(False, True),
                     metric="final_loss") -> SweepReport:
    """Grid over batch sizes at a fixed base step size.

    The key None stands for full batch and serializes as "full".
    """
    def cfg_for_key(cfg, bs):
        return replace(cfg, batch_size=bs, active_cfg=None)

    report = _run_cells("batch_size", obj_factory, base_cfg, list(batch_sizes),
                        cfg_for_key, backbones, seeds, active_variants, metric)
    for cell in report.cells:
        if cell.key is None:
            cell.key = "full"
    return report

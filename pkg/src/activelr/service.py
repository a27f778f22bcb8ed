"""Local HTTP service computing optimizer trajectories for the playground.

Stateless: every request builds its own objective and optimizer state, so
concurrent requests cannot interleave.  Responses are plain JSON built
from python floats, which makes identical requests byte-identical.

Error contract: malformed or out-of-range fields give 400 with a list of
{loc, msg} items; an init point of the wrong length gives 422; numerical
divergence never errors, it truncates the trajectory and sets the
``diverged`` flag.
"""

import math
import warnings

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ConfigDict

from .backbones import KINDS, BackboneConfig
from .core import ActiveConfig, ConstraintWarning, MODE_ABSOLUTE, MODE_GAIN
from .harness import RunConfig, run_training
from .objectives import OBJECTIVE_NAMES, named_objective

DEFAULT_PORT = 8787
DEFAULT_MAX_ITERS = 10_000
CONTOUR_RESOLUTION = 101

# Accepted ranges, mirrored by the playground's client-side validation.
ALPHA0_MAX = 100.0
ALPHA_HIGH_MAX = 10.0
SEED_MAX = 2 ** 31 - 1
INIT_POINT_LIMIT = 1e6

_MODES = (MODE_ABSOLUTE, MODE_GAIN)


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    objective: str
    optimizer: str = "adamw"
    active: bool = False
    alpha0: float = 1e-3
    alpha_low: float = 0.9
    alpha_high: float = 0.1
    mode: str = MODE_ABSOLUTE
    init_point: list | None = None
    iterations: int = 100
    seed: int = 0


def _bad(field_name, msg, status=400):
    raise HTTPException(status_code=status,
                        detail=[{"loc": ["body", field_name], "msg": msg}])


def _validate(req: RunRequest, max_iters: int):
    if req.objective not in OBJECTIVE_NAMES:
        _bad("objective", f"unknown objective {req.objective!r}; "
             f"valid: {', '.join(OBJECTIVE_NAMES)}")
    if req.optimizer not in KINDS:
        _bad("optimizer", f"unknown optimizer {req.optimizer!r}; "
             f"valid: {', '.join(KINDS)}")
    if req.mode not in _MODES:
        _bad("mode", f"unknown mode {req.mode!r}; valid: {', '.join(_MODES)}")
    if not (math.isfinite(req.alpha0) and 0.0 < req.alpha0 <= ALPHA0_MAX):
        _bad("alpha0", f"alpha0 must lie in (0, {ALPHA0_MAX:g}]")
    if not (math.isfinite(req.alpha_low) and 0.0 < req.alpha_low < 1.0):
        _bad("alpha_low", "alpha_low must lie in (0, 1)")
    if not (math.isfinite(req.alpha_high) and 0.0 < req.alpha_high <= ALPHA_HIGH_MAX):
        _bad("alpha_high", f"alpha_high must lie in (0, {ALPHA_HIGH_MAX:g}]")
    if not 0 <= req.iterations <= max_iters:
        _bad("iterations", f"iterations must lie in [0, {max_iters}]")
    if not 0 <= req.seed <= SEED_MAX:
        _bad("seed", f"seed must lie in [0, {SEED_MAX}]")
    if req.init_point is not None:
        for v in req.init_point:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                _bad("init_point", "init_point entries must be numbers")
            if not (math.isfinite(v) and abs(v) <= INIT_POINT_LIMIT):
                _bad("init_point",
                     f"init_point entries must be finite with |v| <= {INIT_POINT_LIMIT:g}")


_plot_cache = {}


def _plot_payload(name):
    """Contour grid (2-D) or loss curve (1-D) for one named objective.

    Cached after first computation; the cache is read-only afterwards so
    concurrent requests can share it.
    """
    if name in _plot_cache:
        return _plot_cache[name]
    obj = named_objective(name)
    if obj.dim == 2:
        (x_lo, x_hi), (y_lo, y_hi) = obj.bounds
        xs = np.linspace(x_lo, x_hi, CONTOUR_RESOLUTION)
        ys = np.linspace(y_lo, y_hi, CONTOUR_RESOLUTION)
        gx, gy = np.meshgrid(xs, ys)
        stacked = np.stack([gx.ravel(), gy.ravel()], axis=1)
        if obj.f_rows is not None:
            values = obj.f_rows(stacked)
        else:
            values = np.array([obj.f(row) for row in stacked])
        grid = values.reshape(CONTOUR_RESOLUTION, CONTOUR_RESOLUTION)
        payload = ("contour", {
            "bounds": [[float(x_lo), float(x_hi)], [float(y_lo), float(y_hi)]],
            "resolution": CONTOUR_RESOLUTION,
            "values": [[float(v) for v in row] for row in grid],
        })
    else:
        (x_lo, x_hi), = obj.bounds
        xs = np.linspace(x_lo, x_hi, CONTOUR_RESOLUTION)
        payload = ("curve", {
            "bounds": [float(x_lo), float(x_hi)],
            "resolution": CONTOUR_RESOLUTION,
            "values": [float(obj.f(np.array([x]))) for x in xs],
        })
    _plot_cache[name] = payload
    return payload


def _run_points(req: RunRequest, obj, theta0):
    if req.iterations == 0:
        return [{"iter": 0, "params": [float(v) for v in theta0],
                 "loss": float(obj.f(theta0)), "alpha_mean": req.alpha0}], False

    cfg = RunConfig(
        alpha=req.alpha0,
        backbone=BackboneConfig(kind=req.optimizer),
        active=req.active,
        active_cfg=(ActiveConfig(alpha0=req.alpha0, alpha_high=req.alpha_high,
                                 alpha_low=req.alpha_low, mode=req.mode)
                    if req.active else None),
        epochs=req.iterations,
        steps_per_epoch=1,
        seed=req.seed,
        record_every=1,
        record_params=True,
        theta0=theta0,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstraintWarning)
        traj = run_training(obj, cfg)
    points = [{"iter": r.step, "params": r.params, "loss": r.loss,
               "alpha_mean": r.alpha_mean} for r in traj.iterations]
    if not traj.diverged and traj.final["final_loss"] is not None:
        points.append({
            "iter": traj.final["steps_run"],
            "params": traj.final["final_params"],
            "loss": traj.final["final_loss"],
            "alpha_mean": traj.final["alpha_mean"],
        })
    return points, traj.diverged


def create_app(max_iters: int = DEFAULT_MAX_ITERS, static_dir=None) -> FastAPI:
    app = FastAPI(title="activelr trajectory service", docs_url=None, redoc_url=None)
    app.state.max_iters = max_iters

    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"https?://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request, exc):
        detail = [{"loc": list(err.get("loc", [])), "msg": str(err.get("msg", ""))}
                  for err in exc.errors()]
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz():
        return "ok"

    @app.get("/api/objectives")
    def objectives():
        entries = []
        for name in OBJECTIVE_NAMES:
            obj = named_objective(name)
            entries.append({
                "name": name,
                "dim": obj.dim,
                "default_init": [float(v) for v in obj.default_init],
                "suggested_bounds": [[float(lo), float(hi)] for lo, hi in obj.bounds],
            })
        return JSONResponse(content={"objectives": entries})

    @app.post("/api/run")
    def run(req: RunRequest):
        _validate(req, app.state.max_iters)
        obj = named_objective(req.objective)
        if req.init_point is None:
            theta0 = np.array(obj.default_init, dtype=float)
        else:
            if len(req.init_point) != obj.dim:
                _bad("init_point",
                     f"objective {req.objective!r} needs {obj.dim} coordinates, "
                     f"got {len(req.init_point)}", status=422)
            theta0 = np.array([float(v) for v in req.init_point])

        points, diverged = _run_points(req, obj, theta0)
        body = {
            "objective": req.objective,
            "dim": obj.dim,
            "points": points,
            "diverged": diverged,
            "contour": None,
            "curve": None,
        }
        kind, payload = _plot_payload(req.objective)
        body[kind] = payload
        return JSONResponse(content=body)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app

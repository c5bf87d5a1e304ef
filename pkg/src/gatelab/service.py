"""HTTP service wrapping the workbench.

Stateless: every request carries its full configuration and every response
is a pure function of it.  Physics-validity failures (excessive leakage,
integrator norm drift) map to 422 with a structured ``physics`` code so thin
clients can distinguish them from malformed requests.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__, lab, recipes, schemas
from .config import ConfigError
from .core import IntegrationError
from .gates import ExcessiveLeakageError
from .presets import Preset, get_preset

app = FastAPI(title="gatelab", version=__version__)

PHYSICS_ERRORS = (ExcessiveLeakageError, IntegrationError)


def _preset_from(req: schemas.PresetChoice) -> Preset:
    if req.preset == "custom":
        return Preset(name="custom", **req.custom.model_dump())
    try:
        return get_preset(req.preset)
    except KeyError as exc:
        raise HTTPException(404, detail=str(exc)) from exc


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PHYSICS_ERRORS as exc:
        raise HTTPException(
            422,
            detail={"code": "physics", "error": type(exc).__name__,
                    "message": str(exc)},
        ) from exc
    except (ConfigError, KeyError, ValueError) as exc:
        raise HTTPException(400, detail={"code": "usage", "message": str(exc)}) \
            from exc


@app.get("/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(name="gatelab", version=__version__)


@app.get("/recipes", response_model=schemas.RecipesResponse)
def list_recipes() -> schemas.RecipesResponse:
    entries = [
        schemas.RecipeEntryModel(
            name=e.name, kind=e.kind, n_qubits=e.n_qubits,
            description=e.description, reconstructed=e.reconstructed,
        )
        for e in recipes.recipes()
    ]
    return schemas.RecipesResponse(entries=entries)


@app.post("/regime", response_model=schemas.RegimeResponse)
def regime(req: schemas.RegimeRequest) -> schemas.RegimeResponse:
    preset = _preset_from(req)
    report = _run(lab.run_regime, preset, threshold=req.min_ratio)
    return schemas.RegimeResponse(**{k: v for k, v in report.items()
                                     if k != "kind"})


@app.post("/cz", response_model=schemas.CzResponse)
def cz(req: schemas.CzRequest) -> schemas.CzResponse:
    preset = _preset_from(req)
    report = _run(lab.run_cz, preset, model=req.model, n_atoms=req.n_atoms,
                  n_max=req.n_max, t_units=req.t, n_samples=req.n_samples)
    return schemas.CzResponse(**{k: v for k, v in report.items()
                                 if k != "kind"})


@app.post("/budget", response_model=schemas.BudgetResponse)
def budget(req: schemas.BudgetRequest) -> schemas.BudgetResponse:
    preset = _preset_from(req)
    report = _run(lab.run_budget, preset, n_max=req.n_max,
                  include_measured=req.include_measured)
    return schemas.BudgetResponse(**{k: v for k, v in report.items()
                                     if k != "kind"})


@app.post("/fuse", response_model=schemas.FuseResponse)
def fuse(req: schemas.FuseRequest) -> schemas.FuseResponse:
    name, plan = _run(lab.get_plan, recipe=req.recipe, plan_text=req.plan_text)
    report = _run(lab.run_fuse, plan, name=name, orbit_cap=req.orbit_cap,
                  statevector=req.statevector)
    return schemas.FuseResponse(**{k: v for k, v in report.items()
                                   if k != "kind"})


@app.post("/sweep", response_model=schemas.SweepResponse)
def sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
    preset = _preset_from(req)
    report = _run(lab.run_sweep, preset, param=req.param, values=req.values,
                  metric=req.metric, model=req.model, n_atoms=req.n_atoms,
                  n_max=req.n_max, t_units=req.t)
    return schemas.SweepResponse(
        **{k: v for k, v in report.items() if k not in ("kind", "values")}
    )

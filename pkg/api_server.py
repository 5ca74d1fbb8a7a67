# api_server.py
"""
FastAPI backend for the unification workbench
"""
import asyncio
import logging
from typing import Literal, Optional

import uvicorn
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from checker import check_unifier
from config import get_settings
from errors import MaterializationError, UnificationError
from formatter import format_slp_section, format_stats, format_substitution, format_system
from generators import Family, GenSpec, generate
from pipeline import run_pipeline, solve_problem
from problem_parser import parse_problem_text, parse_substitution_text

logger = logging.getLogger(__name__)

settings = get_settings()
app = FastAPI(title="One-Sided Distributivity Unification API", version="1.0.0")

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class SolveRequest(BaseModel):
    problem: str = Field(..., description="Problem text, one equation per line")
    alg: Literal["ta", "hom", "slp", "asym"] = Field("slp", description="Decider to run")
    budget: Optional[int] = Field(None, gt=0, description="Rule-application budget")
    compressed: bool = Field(False, description="Keep lateral bindings as SLP references")
    require_hom: bool = Field(False, description="Fail instead of falling back when alg=hom does not typecheck")


class VerboseRequest(BaseModel):
    problem: str = Field(..., description="Problem text, one equation per line")
    budget: Optional[int] = Field(None, gt=0, description="Rule-application budget")


class VerifyRequest(BaseModel):
    problem: str = Field(..., description="Problem text, one equation per line")
    substitution: str = Field(..., description="Substitution text, optionally with an SLP section")


class GenerateRequest(BaseModel):
    family: Family = Field(..., description="sigma, sigma-prime or random")
    n: int = Field(0, ge=0, description="Size index of the sigma families")
    seed: int = Field(0, ge=0, description="Seed of the random family")
    variables: Optional[int] = Field(None, ge=2, le=64, description="Variable pool size")
    sums: Optional[int] = Field(None, ge=0, description="Sum equations")
    products: Optional[int] = Field(None, ge=0, description="Product equations")
    labels: Optional[int] = Field(None, ge=1, description="Label variables")
    acyclic: Optional[bool] = Field(None, description="No dependency cycles by construction")


def _solve(request: SolveRequest) -> dict:
    system = parse_problem_text(request.problem)
    outcome = solve_problem(system, request.alg, budget=request.budget, require_hom=request.require_hom)
    response = {
        "decision": outcome.verdict.value,
        "reason": outcome.reason.value if outcome.reason else None,
        "stats": format_stats(outcome.stats),
        "substitution": None,
        "slp": None,
    }
    if outcome.unifiable:
        try:
            sigma = outcome.unifier(compressed=request.compressed)
        except MaterializationError as e:
            response["substitution"] = f"not materializable: {e}"
            sigma = outcome.unifier(compressed=True)
        else:
            response["substitution"] = format_substitution(sigma)
        section = format_slp_section(path.label for path in sigma.lateral.values())
        response["slp"] = section or None
    return response


def _verify(request: VerifyRequest) -> dict:
    system = parse_problem_text(request.problem)
    sigma = parse_substitution_text(request.substitution)
    return check_unifier(system, sigma)


def _generate(request: GenerateRequest) -> dict:
    fields = request.model_dump(exclude_none=True)
    spec = GenSpec(**fields)
    return {"problem": format_system(generate(spec))}


async def _call(func, request):
    try:
        return await asyncio.to_thread(func, request)
    except (UnificationError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.exception("request failed")
        raise HTTPException(status_code=500, detail=f"Error: {e}")


@app.get("/")
async def root():
    """Health check endpoint"""
    return {"message": "Unification API is running"}


@app.post("/api/solve", response_model=dict)
async def solve(request: SolveRequest):
    return await _call(_solve, request)


@app.post("/api/solve/verbose", response_model=dict)
async def solve_verbose(request: VerboseRequest):
    """Every applicable decider, cross-checked, with the execution log."""

    def work(req: VerboseRequest) -> dict:
        return run_pipeline(parse_problem_text(req.problem), verbose=True, budget=req.budget)

    return await _call(work, request)


@app.post("/api/verify", response_model=dict)
async def verify(request: VerifyRequest):
    return await _call(_verify, request)


@app.post("/api/generate", response_model=dict)
async def generate_problem(request: GenerateRequest):
    return await _call(_generate, request)


if __name__ == "__main__":
    uvicorn.run(app, host=settings.api_host, port=settings.api_port)

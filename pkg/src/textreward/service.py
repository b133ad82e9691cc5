"""Batch scoring over HTTP: POST /score, POST /advantage, GET /healthz.

Requests are JSON batches. A malformed request fails as a whole with a 4xx
and a machine-readable body; a malformed item inside a well-formed request
fails alone, reported under errors by id, and the batch still returns 200.
Every id in a request appears exactly once in the response, in either
scores or errors.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import asynccontextmanager
from typing import List, Optional, Union

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator

from .errors import InvalidInputError, TextRewardError
from .metrics import config_from_mapping
from .pipeline import _score_payload
from .rewards import DEFAULT_EPSILON, REFERENCE_FREE_SPECS, REWARD_SPECS, RewardGroup, group_advantage

PARALLEL_BATCH_FLOOR = 64  # below this, pool dispatch costs more than it saves


class ScoreItem(BaseModel):
    id: str
    candidate: Optional[str] = None
    references: Optional[List[str]] = None


class ScoreRequest(BaseModel):
    items: List[ScoreItem]
    reward_spec: str = "bleu"
    config: Optional[dict] = None

    @field_validator("items")
    @classmethod
    def _unique_ids(cls, items):
        seen = set()
        for item in items:
            if item.id in seen:
                raise ValueError(f"duplicate item id {item.id!r}")
            seen.add(item.id)
        return items


class Timing(BaseModel):
    wall_time_seconds: float
    items: int


class ScoreResponse(BaseModel):
    scores: dict
    errors: dict
    timing: Timing


class GroupModel(BaseModel):
    prompt_id: str
    candidates: List[str] = Field(default_factory=list)
    rewards: List[float] = Field(default_factory=list)
    reward_spec: str = ""


class AdvantageEnvelope(BaseModel):
    groups: List[GroupModel]
    epsilon: float = DEFAULT_EPSILON


class AdvantageResponse(BaseModel):
    advantages: dict
    errors: dict
    timing: Timing


def create_app(workers=1):
    """Application factory. workers > 1 fans scoring out across processes."""

    @asynccontextmanager
    async def lifespan(app):
        app.state.pool = None
        if workers > 1:
            app.state.pool = ProcessPoolExecutor(max_workers=workers)
        yield
        if app.state.pool is not None:
            app.state.pool.shutdown()

    app = FastAPI(title="textreward", lifespan=lifespan)
    app.state.workers = workers

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/score", response_model=ScoreResponse)
    def score(request: ScoreRequest):
        if request.reward_spec not in REWARD_SPECS:
            raise HTTPException(
                status_code=422,
                detail={"error": f"unknown reward_spec {request.reward_spec!r}",
                        "known": sorted(REWARD_SPECS)},
            )
        try:
            config = config_from_mapping(request.config)
        except (InvalidInputError, TypeError) as err:
            raise HTTPException(status_code=422, detail={"error": str(err)})

        started = time.perf_counter()
        errors = {}
        payloads = []
        needs_refs = request.reward_spec not in REFERENCE_FREE_SPECS
        for item in request.items:
            if item.candidate is None:
                errors[item.id] = "missing candidate"
            elif needs_refs and not item.references:
                errors[item.id] = "missing references"
            else:
                payloads.append(
                    (item.id, item.candidate, item.references, request.reward_spec, config)
                )

        pool = app.state.pool
        if pool is not None and len(payloads) >= PARALLEL_BATCH_FLOOR:
            chunk = max(1, len(payloads) // (app.state.workers * 4))
            results = list(pool.map(_score_payload, payloads, chunksize=chunk))
        else:
            results = [_score_payload(p) for p in payloads]

        scores = {}
        for item_id, ok, outcome in results:
            if ok:
                scores[item_id] = outcome
            else:
                errors[item_id] = outcome
        elapsed = time.perf_counter() - started
        return ScoreResponse(
            scores=scores, errors=errors,
            timing=Timing(wall_time_seconds=elapsed, items=len(request.items)),
        )

    @app.post("/advantage", response_model=AdvantageResponse)
    def advantage(payload: Union[List[GroupModel], AdvantageEnvelope]):
        if isinstance(payload, AdvantageEnvelope):
            groups, epsilon = payload.groups, payload.epsilon
        else:
            groups, epsilon = payload, DEFAULT_EPSILON
        seen = set()
        for group in groups:
            if group.prompt_id in seen:
                raise HTTPException(
                    status_code=422,
                    detail={"error": f"duplicate prompt_id {group.prompt_id!r}"},
                )
            seen.add(group.prompt_id)

        started = time.perf_counter()
        advantages = {}
        errors = {}
        for group in groups:
            try:
                reward_group = RewardGroup(
                    prompt_id=group.prompt_id,
                    candidates=group.candidates,
                    rewards=group.rewards,
                    reward_spec=group.reward_spec,
                )
                vector = group_advantage(reward_group, epsilon=epsilon)
                advantages[group.prompt_id] = list(vector.values)
            except TextRewardError as err:
                errors[group.prompt_id] = str(err)
        elapsed = time.perf_counter() - started
        return AdvantageResponse(
            advantages=advantages, errors=errors,
            timing=Timing(wall_time_seconds=elapsed, items=len(groups)),
        )

    return app


def serve(host="127.0.0.1", port=8080, workers=1):
    """Run the service until interrupted. A taken port raises at startup."""
    import uvicorn

    uvicorn.run(create_app(workers=workers), host=host, port=port, log_level="warning")

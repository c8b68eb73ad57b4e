"""HTTP service for the pairwise study: serve pairs, record votes, rank.

Votes are appended to a JSONL log with an fsync per vote; the log file
is the single source of truth, and replaying it offline yields exactly
the rankings this service reports. Presentation order is randomized per
serve and recorded server side, so clients only ever say "left" or
"right" and can never misattribute a winner.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .ranking import (
    ComparisonRecord,
    EloConfig,
    ModelRating,
    RatingTable,
    bootstrap_elo,
    elo_ratings,
    load_comparison_log,
    record_to_json,
)

ASSIGNMENT_EXPIRY_S = 30 * 60


@dataclass(frozen=True)
class PoolPair:
    """A candidate comparison: two models with their media files."""

    pair_key: str
    model_a: str
    model_b: str
    media_a: str
    media_b: str

    def __post_init__(self):
        if self.model_a == self.model_b:
            raise ValueError(f"pool pair {self.pair_key}: model_a == model_b")


def load_pool(path: str | Path) -> list[PoolPair]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    pairs = [
        PoolPair(
            pair_key=str(p["pair_key"]),
            model_a=str(p["model_a"]),
            model_b=str(p["model_b"]),
            media_a=str(p["media_a"]),
            media_b=str(p["media_b"]),
        )
        for p in obj
    ]
    return pairs


@dataclass
class _Assignment:
    pair: PoolPair
    annotator: str
    left_is_a: bool
    served_at: float
    voted: bool = False


class VoteBody(BaseModel):
    pair_id: str
    choice: str
    annotator: str


class StudyState:
    """Pair pool, live assignments, and the append-only vote log."""

    def __init__(self, pool: list[PoolPair], log_path: str | Path, seed: int = 0,
                 expiry_s: float = ASSIGNMENT_EXPIRY_S):
        self.pool = list(pool)
        self.log_path = Path(log_path)
        self.expiry_s = expiry_s
        self._rng = random.Random(seed)
        self._lock = threading.Lock()
        self._assignments: dict[str, _Assignment] = {}
        self._serial = 0
        self.records: list[ComparisonRecord] = []
        if self.log_path.exists():
            self.records = load_comparison_log(self.log_path)
        else:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)

    def model_names(self) -> list[str]:
        names: list[str] = []
        for pair in self.pool:
            for model in (pair.model_a, pair.model_b):
                if model not in names:
                    names.append(model)
        return names

    def serve_pair(self, annotator: str) -> dict:
        with self._lock:
            if not self.pool:
                raise HTTPException(status_code=409, detail="pair pool is empty")
            pair = self.pool[self._rng.randrange(len(self.pool))]
            left_is_a = bool(self._rng.getrandbits(1))
            self._serial += 1
            token = f"{self._serial:06d}-{self._rng.getrandbits(48):012x}"
            self._assignments[token] = _Assignment(
                pair=pair, annotator=annotator, left_is_a=left_is_a,
                served_at=time.monotonic(),
            )
            return {
                "pair_id": token,
                "media_url_a": f"/media/{pair.media_a}",
                "media_url_b": f"/media/{pair.media_b}",
                "left_is_a": left_is_a,
                "expires_in_s": self.expiry_s,
            }

    def record_vote(self, pair_id: str, choice: str, annotator: str) -> None:
        if choice not in ("left", "right"):
            raise HTTPException(status_code=400, detail="choice must be left or right")
        with self._lock:
            assignment = self._assignments.get(pair_id)
            if assignment is None or assignment.annotator != annotator:
                raise HTTPException(status_code=404, detail="unknown pair_id")
            if time.monotonic() - assignment.served_at > self.expiry_s:
                raise HTTPException(status_code=404, detail="assignment expired")
            if assignment.voted:
                raise HTTPException(status_code=409, detail="vote already recorded")
            chose_a = (choice == "left") == assignment.left_is_a
            record = ComparisonRecord(
                pair_id=pair_id,
                model_a=assignment.pair.model_a,
                model_b=assignment.pair.model_b,
                winner="A" if chose_a else "B",
                annotator=annotator,
                timestamp=datetime.now(timezone.utc).isoformat(),
            )
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(record_to_json(record) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            assignment.voted = True
            self.records.append(record)

    def rankings(self, config: EloConfig, bootstrap: bool) -> RatingTable:
        with self._lock:
            records = list(self.records)
        if not records:
            return {
                model: ModelRating(
                    rating=config.initial_rating,
                    ci_low=config.initial_rating,
                    ci_high=config.initial_rating,
                    games=0,
                )
                for model in self.model_names()
            }
        if bootstrap:
            return bootstrap_elo(records, config).table
        return elo_ratings(records, config)


def create_app(
    pool: list[PoolPair],
    log_path: str | Path,
    media_dir: str | Path | None = None,
    seed: int = 0,
    elo_config: EloConfig = EloConfig(),
    expiry_s: float = ASSIGNMENT_EXPIRY_S,
    cors_origins: tuple[str, ...] = ("*",),
) -> FastAPI:
    app = FastAPI(title="lipsynckit study service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    state = StudyState(pool, log_path, seed=seed, expiry_s=expiry_s)
    app.state.study = state

    @app.get("/health")
    def health():
        return {"status": "ok", "votes": len(state.records)}

    @app.get("/pair")
    def get_pair(annotator: str = Query(default="")):
        if not annotator.strip():
            raise HTTPException(status_code=400, detail="annotator id required")
        return state.serve_pair(annotator.strip())

    @app.post("/vote")
    def post_vote(body: VoteBody):
        if not body.annotator.strip():
            raise HTTPException(status_code=400, detail="annotator id required")
        state.record_vote(body.pair_id, body.choice, body.annotator.strip())
        return {"status": "recorded"}

    @app.get("/rankings")
    def get_rankings(bootstrap: bool = Query(default=False)):
        table = state.rankings(elo_config, bootstrap)
        models = sorted(table.items(), key=lambda kv: (-kv[1].rating, kv[0]))
        return {
            "models": [
                {
                    "model": model,
                    "rating": r.rating,
                    "ci_low": r.ci_low,
                    "ci_high": r.ci_high,
                    "games": r.games,
                }
                for model, r in models
            ]
        }

    if media_dir is not None and Path(media_dir).is_dir():
        app.mount("/media", StaticFiles(directory=str(media_dir)), name="media")
    return app

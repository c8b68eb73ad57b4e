"""Elo ratings over pairwise comparison logs, with bootstrap intervals.

Ratings are computed online in log order: the expected score of A
against B is 1 / (1 + 10^((R_B - R_A) / 400)) and each game moves the
winner up and the loser down by K times the surprise. A single pass is
order sensitive, so the bootstrap resamples and reshuffles the log per
round; the reported point estimate is the median across rounds.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

WINNER_VALUES = ("A", "B")


@dataclass(frozen=True)
class ComparisonRecord:
    """One pairwise judgment: which of two models the annotator preferred."""

    pair_id: str
    model_a: str
    model_b: str
    winner: str
    annotator: str
    timestamp: str

    def __post_init__(self):
        if self.model_a == self.model_b:
            raise ValueError(f"pair {self.pair_id}: model_a == model_b ({self.model_a})")
        if self.winner not in WINNER_VALUES:
            raise ValueError(
                f"pair {self.pair_id}: winner must be 'A' or 'B', got {self.winner!r}"
            )


@dataclass(frozen=True)
class EloConfig:
    initial_rating: float = 1000.0
    k_factor: float = 32.0
    bootstrap_rounds: int = 1000
    ci_level: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if self.k_factor <= 0:
            raise ValueError(f"k_factor must be positive, got {self.k_factor}")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError(f"ci_level must be in (0, 1), got {self.ci_level}")
        if self.bootstrap_rounds < 1:
            raise ValueError(
                f"bootstrap_rounds must be >= 1, got {self.bootstrap_rounds}"
            )


@dataclass(frozen=True)
class ModelRating:
    rating: float
    ci_low: float
    ci_high: float
    games: int


# Model name -> rating row, insertion-ordered by first appearance in the log.
RatingTable = dict[str, ModelRating]


@dataclass(frozen=True)
class BootstrapResult:
    """Rating table plus the per-round ratings it was reduced from."""

    table: RatingTable
    rounds: dict[str, np.ndarray]


def elo_expected_score(rating_a: float, rating_b: float) -> float:
    """Probability-like expected score of A against B."""
    return 1.0 / (1.0 + 10.0 ** ((rating_b - rating_a) / 400.0))


def _run_elo(
    records: Sequence[ComparisonRecord], config: EloConfig
) -> tuple[dict[str, float], dict[str, int]]:
    ratings: dict[str, float] = {}
    games: dict[str, int] = {}
    k = config.k_factor
    for record in records:
        a, b = record.model_a, record.model_b
        r_a = ratings.setdefault(a, config.initial_rating)
        r_b = ratings.setdefault(b, config.initial_rating)
        expected_a = elo_expected_score(r_a, r_b)
        score_a = 1.0 if record.winner == "A" else 0.0
        ratings[a] = r_a + k * (score_a - expected_a)
        ratings[b] = r_b + k * ((1.0 - score_a) - (1.0 - expected_a))
        games[a] = games.get(a, 0) + 1
        games[b] = games.get(b, 0) + 1
    return ratings, games


def elo_ratings(
    records: Sequence[ComparisonRecord], config: EloConfig = EloConfig()
) -> RatingTable:
    """Single sequential pass over the log, in the given order."""
    if not records:
        raise ValueError("comparison log is empty")
    ratings, games = _run_elo(records, config)
    return {
        model: ModelRating(rating=r, ci_low=r, ci_high=r, games=games[model])
        for model, r in ratings.items()
    }


def bootstrap_elo(
    records: Sequence[ComparisonRecord], config: EloConfig = EloConfig()
) -> BootstrapResult:
    """Resample the log with replacement per round and shuffle its order.

    Point estimate per model is the median across rounds; the interval
    is the empirical (1 - ci) / 2 and 1 - (1 - ci) / 2 percentiles.
    Models absent from a round's resample sit at the initial rating for
    that round.
    """
    if not records:
        raise ValueError("comparison log is empty")
    records = list(records)
    _, games = _run_elo(records, config)
    models = list(games)
    rng = np.random.default_rng(config.seed)
    n = len(records)
    per_round = {model: np.empty(config.bootstrap_rounds) for model in models}
    for round_idx in range(config.bootstrap_rounds):
        sample_idx = rng.integers(0, n, size=n)
        rng.shuffle(sample_idx)
        resampled = [records[i] for i in sample_idx]
        ratings, _ = _run_elo(resampled, config)
        for model in models:
            per_round[model][round_idx] = ratings.get(model, config.initial_rating)

    low_q = (1.0 - config.ci_level) / 2.0
    table: RatingTable = {}
    for model in models:
        rounds = per_round[model]
        table[model] = ModelRating(
            rating=float(np.median(rounds)),
            ci_low=float(np.quantile(rounds, low_q)),
            ci_high=float(np.quantile(rounds, 1.0 - low_q)),
            games=games[model],
        )
    return BootstrapResult(table=table, rounds=per_round)


def win_rate_matrix(
    records: Sequence[ComparisonRecord],
) -> dict[str, dict[str, float]]:
    """W[i][j] = fraction of i-vs-j games won by i; absent when untested."""
    if not records:
        raise ValueError("comparison log is empty")
    wins: dict[tuple[str, str], int] = {}
    matches: dict[tuple[str, str], int] = {}
    models: list[str] = []
    for record in records:
        a, b = record.model_a, record.model_b
        for m in (a, b):
            if m not in models:
                models.append(m)
        winner = a if record.winner == "A" else b
        loser = b if record.winner == "A" else a
        wins[(winner, loser)] = wins.get((winner, loser), 0) + 1
        for key in ((a, b), (b, a)):
            matches[key] = matches.get(key, 0) + 1
    matrix: dict[str, dict[str, float]] = {m: {} for m in models}
    for i in models:
        for j in models:
            if i != j and matches.get((i, j), 0) > 0:
                matrix[i][j] = wins.get((i, j), 0) / matches[(i, j)]
    return matrix


def rating_distribution(
    result: BootstrapResult, n_bins: int = 20
) -> dict[str, list[tuple[float, float, int]]]:
    """Histogram of per-round ratings per model over a shared bin grid.

    Bins are fixed-width over the global rating range; each model's
    counts sum to the number of bootstrap rounds.
    """
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    if not result.rounds:
        raise ValueError("bootstrap result holds no rounds")
    all_values = np.concatenate(list(result.rounds.values()))
    if all_values.size == 0:
        raise ValueError("bootstrap result holds no rounds")
    lo, hi = float(all_values.min()), float(all_values.max())
    if lo == hi:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, n_bins + 1)
    out: dict[str, list[tuple[float, float, int]]] = {}
    for model, rounds in result.rounds.items():
        counts, _ = np.histogram(rounds, bins=edges)
        out[model] = [
            (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(n_bins)
        ]
    return out


def load_comparison_log(path: str | Path) -> list[ComparisonRecord]:
    """Read one ComparisonRecord per JSON line."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append(
                    ComparisonRecord(
                        pair_id=str(obj["pair_id"]),
                        model_a=str(obj["model_a"]),
                        model_b=str(obj["model_b"]),
                        winner=str(obj["winner"]),
                        annotator=str(obj["annotator"]),
                        timestamp=str(obj["timestamp"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad comparison record: {exc}") from exc
    return records


def save_comparison_log(records: Iterable[ComparisonRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_json(record) + "\n")


def record_to_json(record: ComparisonRecord) -> str:
    return json.dumps(
        {
            "pair_id": record.pair_id,
            "model_a": record.model_a,
            "model_b": record.model_b,
            "winner": record.winner,
            "annotator": record.annotator,
            "timestamp": record.timestamp,
        }
    )


def write_ratings_csv(path: str | Path, table: RatingTable) -> None:
    """ratings.csv: model,rating,ci_low,ci_high,games sorted by rating desc."""
    rows = sorted(table.items(), key=lambda kv: (-kv[1].rating, kv[0]))
    _write_csv(
        path,
        ("model", "rating", "ci_low", "ci_high", "games"),
        (
            (model, repr(r.rating), repr(r.ci_low), repr(r.ci_high), r.games)
            for model, r in rows
        ),
    )


def write_winrate_csv(path: str | Path, matrix: dict[str, dict[str, float]]) -> None:
    """winrate.csv: row model, column model, rate; one row per defined cell."""
    rows = []
    for i in sorted(matrix):
        for j in sorted(matrix[i]):
            rows.append((i, j, repr(matrix[i][j])))
    _write_csv(path, ("model", "opponent", "win_rate"), rows)


def write_histogram_csv(
    path: str | Path, histogram: dict[str, list[tuple[float, float, int]]]
) -> None:
    rows = []
    for model in sorted(histogram):
        for bin_low, bin_high, count in histogram[model]:
            rows.append((model, repr(bin_low), repr(bin_high), count))
    _write_csv(path, ("model", "bin_low", "bin_high", "count"), rows)


def _write_csv(path: str | Path, header: tuple[str, ...], rows: Iterable) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    tmp.replace(path)

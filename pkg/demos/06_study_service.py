"""Driving the pairwise study service in process.

Serves assignments, casts votes with randomized side order, and shows
that replaying the persisted vote log offline reproduces the service's
live rankings exactly. To run the real HTTP server instead:

    lipsynckit serve --pool-path pool.json --log-path votes.jsonl \
        --media-dir media/ --port 8000

and point the study UI (frontend/) at it.
"""

import json
import random
from pathlib import Path

from lipsynckit.ranking import EloConfig, elo_ratings, load_comparison_log
from lipsynckit.service import PoolPair, StudyState

out_dir = Path("demo_output/study_service")
out_dir.mkdir(parents=True, exist_ok=True)
log_path = out_dir / "votes.jsonl"
log_path.unlink(missing_ok=True)

models = ["two-stage", "one-stage", "frame-based"]
pool = [
    PoolPair(pair_key=f"{a}|{b}", model_a=a, model_b=b,
             media_a=f"{a}.mp4", media_b=f"{b}.mp4")
    for i, a in enumerate(models)
    for b in models[i + 1 :]
]
pool_file = out_dir / "pool.json"
pool_file.write_text(json.dumps([p.__dict__ for p in pool], indent=2), encoding="utf-8")

state = StudyState(pool, log_path, seed=5)
rng = random.Random(99)

# Simulated annotators who slightly prefer whatever is on a stronger row.
preference = {"two-stage": 0.8, "one-stage": 0.5, "frame-based": 0.2}
for i in range(60):
    annotator = f"annotator-{i % 4}"
    assignment = state.serve_pair(annotator)
    pair = state._assignments[assignment["pair_id"]].pair
    left_model = pair.model_a if assignment["left_is_a"] else pair.model_b
    right_model = pair.model_b if assignment["left_is_a"] else pair.model_a
    p_left = preference[left_model] / (preference[left_model] + preference[right_model])
    choice = "left" if rng.random() < p_left else "right"
    state.record_vote(assignment["pair_id"], choice, annotator)

print(f"recorded {len(state.records)} votes in {log_path}")

live = state.rankings(EloConfig(), bootstrap=False)
replayed = elo_ratings(load_comparison_log(log_path), EloConfig())
print("\nlive rankings vs offline replay of the log:")
for model, row in sorted(live.items(), key=lambda kv: -kv[1].rating):
    match = "==" if replayed[model].rating == row.rating else "!="
    print(f"  {model:<12} {row.rating:8.2f} {match} {replayed[model].rating:8.2f} "
          f"({row.games} games)")
assert all(replayed[m].rating == live[m].rating for m in live)
print("single source of truth: the JSONL log")

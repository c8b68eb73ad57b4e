"""Ranking models from pairwise human judgments.

Simulates a 1000-comparison study between four models with planted
skill gaps, then recovers the ordering with online Elo, bootstrap
confidence intervals, and the head-to-head win-rate matrix.
"""

from lipsynckit.fixtures import synthetic_comparison_log
from lipsynckit.ranking import EloConfig, bootstrap_elo, win_rate_matrix

strengths = {
    "two-stage": 1250.0,
    "one-stage": 1080.0,
    "frame-based": 950.0,
    "gan-baseline": 820.0,
}
records = synthetic_comparison_log(strengths, n_records=1000, seed=12)
print(f"simulated {len(records)} pairwise comparisons between {len(strengths)} models")

config = EloConfig(bootstrap_rounds=500, seed=3)
result = bootstrap_elo(records, config)
print(f"\nbootstrap ratings ({config.bootstrap_rounds} rounds, "
      f"{config.ci_level:.0%} intervals):")
for model, row in sorted(result.table.items(), key=lambda kv: -kv[1].rating):
    print(f"  {model:<14} {row.rating:7.1f}  [{row.ci_low:7.1f}, {row.ci_high:7.1f}]"
          f"  over {row.games} games")

matrix = win_rate_matrix(records)
models = sorted(strengths, key=strengths.get, reverse=True)
print("\nwin rates (row beats column):")
print("  " + " ".join(f"{m[:10]:>12}" for m in models))
for i in models:
    cells = [
        f"{matrix[i][j]:12.2f}" if j in matrix[i] else f"{'-':>12}"
        for j in models
    ]
    print(f"  {i[:10]:<12}" + " ".join(cells))

"""Command-line entry point for every pipeline in the toolkit.

Exit codes: 0 on success, 2 for input errors (missing or malformed
files, bad flag combinations), 3 for numeric failures during training.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, apply_overrides, load_config
from .curation import CurationConfig, curate, load_manifest, report_summary, report_to_json
from .landmarks import load_track
from .masking import MaskParams, MaskVariant, build_mask, load_mask, refine_with_occlusion, save_mask
from .metrics import (
    DEFAULT_MAR_THRESHOLD,
    lipleak,
    lipleak_threshold_sweep,
    mar_series,
    write_lipleak_csv,
    write_mar_series_csv,
)
from .ranking import (
    EloConfig,
    bootstrap_elo,
    elo_ratings,
    load_comparison_log,
    rating_distribution,
    win_rate_matrix,
    write_histogram_csv,
    write_ratings_csv,
    write_winrate_csv,
)
from .storage import atomic_write_text, frame_pgm_name
from .toy import NonFiniteLossError

EXIT_INPUT_ERROR = 2
EXIT_NUMERIC_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lipsynckit",
        description="Masking, leakage metrics, toy masked diffusion, curation, "
        "and Elo-based study tooling for lip-sync evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mask", help="build per-frame inpainting masks from landmarks")
    p.add_argument("landmarks", help="path to <video_id>.landmarks.jsonl")
    p.add_argument("--out-dir", required=True, help="directory for <video_id>/<frame>.pgm files")
    p.add_argument(
        "--variant",
        choices=[v.value for v in MaskVariant],
        default=MaskVariant.OURS.value,
        help="mask style (default: ours, nose-level top edge and full-width bottom)",
    )
    p.add_argument("--side-pad", type=float, default=0.05,
                   help="side padding as a fraction of face width (default: 0.05)")
    p.add_argument("--above-nose", type=float, default=0.1,
                   help="top edge rise above the nose tip as a fraction of face height (default: 0.1)")
    p.add_argument("--mouth-pad", type=float, default=0.1,
                   help="mouth-only padding as a fraction of face width (default: 0.1)")
    p.add_argument("--occlusion-dir", default=None,
                   help="directory of occlusion PGMs to subtract, <video_id>/<frame>.pgm")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("lipleak", help="leakage metric over a landmark track")
    p.add_argument("landmarks", help="path to <video_id>.landmarks.jsonl")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threshold", type=float, default=None,
                   help=f"MAR open-mouth threshold (default: {DEFAULT_MAR_THRESHOLD})")
    p.add_argument("--sweep", default=None,
                   help="comma-separated ascending thresholds, e.g. 0.1,0.25,0.5")
    p.set_defaults(func=cmd_lipleak)

    p = sub.add_parser("elo", help="Elo ratings from a pairwise comparison log")
    p.add_argument("log", help="JSONL comparison log")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--k-factor", type=float, default=32.0, help="Elo K factor (default: 32)")
    p.add_argument("--initial", type=float, default=1000.0,
                   help="initial rating (default: 1000)")
    p.add_argument("--rounds", type=int, default=1000,
                   help="bootstrap rounds; 0 disables the bootstrap (default: 1000)")
    p.add_argument("--ci", type=float, default=0.95,
                   help="confidence level for bootstrap intervals (default: 0.95)")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed (default: 0)")
    p.add_argument("--bins", type=int, default=20,
                   help="histogram bins for rating distributions (default: 20)")
    p.set_defaults(func=cmd_elo)

    p = sub.add_parser("curate", help="apply the curation gates to a manifest")
    p.add_argument("manifest", help="CurationManifest JSON file")
    p.add_argument("--out-report", required=True, help="path for the JSON report")
    p.add_argument("--min-clip-s", type=float, default=1.0,
                   help="drop scene clips shorter than this (default: 1.0)")
    p.add_argument("--quality-cmd", default=None,
                   help="external scorer command for missing quality scores")
    p.add_argument("--asd-cmd", default=None,
                   help="external scorer command for missing active-speaker scores")
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser(
        "simulate",
        help="train the toy two-stage masked-diffusion pipeline on synthetic clips "
        "(defaults: 14 keyframes 12 apart, sigma_data 0.5, guidance 5/2, 500 steps, seed 7)",
    )
    p.add_argument("--config", default=None, help="TOML key=value config file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--steps", type=int, default=None, help="training steps per stage (default: 500)")
    p.add_argument("--seed", type=int, default=None, help="master seed (default: 7)")
    p.add_argument("--inference-steps", type=int, default=None,
                   help="sampler steps (default: 10)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the pairwise study service")
    p.add_argument("--pool-path", required=True, help="JSON list of candidate pairs")
    p.add_argument("--log-path", required=True, help="JSONL vote log (appended, fsynced)")
    p.add_argument("--media-dir", default=None, help="directory served under /media")
    p.add_argument("--port", type=int, default=8000, help="listen port (default: 8000)")
    p.add_argument("--host", default="127.0.0.1", help="bind address (default: 127.0.0.1)")
    p.add_argument("--seed", type=int, default=0, help="pair-sampling seed (default: 0)")
    p.set_defaults(func=cmd_serve)
    return parser


def cmd_mask(args) -> int:
    track = load_track(args.landmarks)
    params = MaskParams(
        side_pad_frac=args.side_pad,
        above_nose_frac=args.above_nose,
        mouth_pad_frac=args.mouth_pad,
    )
    variant = MaskVariant(args.variant)
    out_dir = Path(args.out_dir)
    written = 0
    for frame in track.frames:
        mask = build_mask(frame, variant, params)
        if args.occlusion_dir is not None:
            occ_path = Path(args.occlusion_dir) / track.video_id / frame_pgm_name(frame.frame_index)
            if occ_path.exists():
                mask = refine_with_occlusion(mask, load_mask(occ_path))
        save_mask(mask, out_dir, track.video_id, frame.frame_index)
        written += 1
    print(f"wrote {written} masks to {out_dir / track.video_id}")
    return 0


def cmd_lipleak(args) -> int:
    track = load_track(args.landmarks)
    out_dir = Path(args.out_dir)
    if args.sweep is not None:
        thresholds = [float(t) for t in args.sweep.split(",") if t.strip()]
        results = lipleak_threshold_sweep(track, thresholds)
        rows = [(track.video_id, t, value) for t, value in results]
        threshold_for_series = thresholds[0]
    else:
        threshold = args.threshold if args.threshold is not None else DEFAULT_MAR_THRESHOLD
        rows = [(track.video_id, threshold, lipleak(track, threshold))]
        threshold_for_series = threshold
    write_lipleak_csv(out_dir / "lipleak.csv", rows)
    write_mar_series_csv(out_dir / "mar_series.csv", mar_series(track, threshold_for_series))
    for video_id, threshold, value in rows:
        print(f"{video_id}\tthreshold={threshold:g}\tlipleak={value:.6f}")
    return 0


def cmd_elo(args) -> int:
    records = load_comparison_log(args.log)
    if not records:
        raise ValueError(f"{args.log}: comparison log is empty")
    out_dir = Path(args.out_dir)
    if args.rounds > 0:
        config = EloConfig(
            initial_rating=args.initial, k_factor=args.k_factor,
            bootstrap_rounds=args.rounds, ci_level=args.ci, seed=args.seed,
        )
        result = bootstrap_elo(records, config)
        table = result.table
        write_histogram_csv(out_dir / "histogram.csv", rating_distribution(result, args.bins))
    else:
        config = EloConfig(
            initial_rating=args.initial, k_factor=args.k_factor, seed=args.seed
        )
        table = elo_ratings(records, config)
        write_histogram_csv(out_dir / "histogram.csv", {})
    write_ratings_csv(out_dir / "ratings.csv", table)
    write_winrate_csv(out_dir / "winrate.csv", win_rate_matrix(records))
    for model, rating in sorted(table.items(), key=lambda kv: -kv[1].rating):
        print(
            f"{model}\trating={rating.rating:.2f}\t"
            f"ci=[{rating.ci_low:.2f}, {rating.ci_high:.2f}]\tgames={rating.games}"
        )
    return 0


def cmd_curate(args) -> int:
    manifest = load_manifest(args.manifest)
    config = CurationConfig(
        min_clip_s=args.min_clip_s,
        quality_cmd=args.quality_cmd,
        asd_cmd=args.asd_cmd,
    )
    report = curate(manifest, config)
    atomic_write_text(Path(args.out_report), report_to_json(report) + "\n")
    print(report_summary(report))
    return 0


def cmd_simulate(args) -> int:
    from .simulate import run_simulation

    config = load_config(args.config) if args.config else RunConfig()
    config = apply_overrides(
        config, steps=args.steps, seed=args.seed, inference_steps=args.inference_steps
    )
    summary = run_simulation(config, args.out_dir)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_pool

    pool = load_pool(args.pool_path)
    app = create_app(
        pool, log_path=args.log_path, media_dir=args.media_dir, seed=args.seed
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonFiniteLossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_ERROR
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

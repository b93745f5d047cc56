"""
Command-line interface for the MLE decoder.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv

from mle_decoder.decoders.factory import build_decoder, describe
from mle_decoder.dem import dump_model, load_model, model_to_program, serialize_dem
from mle_decoder.exceptions import DecoderError
from mle_decoder.model import ErrorModel
from mle_decoder.simulator.generators import (
    gen_random_ldpc,
    gen_repetition_code,
    gen_surface_code_capacity,
)
from mle_decoder.simulator.sampling import decode_all, run_experiment, sample_shot, shot_rng
from mle_decoder.simulator.stats import ShotStats, summarize
from mle_decoder.utils.config import (
    DecoderConfig,
    DecoderKind,
    EnsembleConfig,
    PresetName,
    SearchConfig,
    preset_config,
)
from mle_decoder.utils.shot_io import (
    LOW_CONFIDENCE,
    ShotFormat,
    format_bits,
    read_observables,
    read_syndromes,
    write_observables,
    write_syndromes,
)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "model",
    "p",
    "decoder",
    "shots",
    "errors",
    "per_shot",
    "per_round",
    "ci_lo",
    "ci_hi",
    "mean_decode_us",
]


def _bound(value: str) -> float:
    """Non-negative integer, or ``inf`` for unbounded."""
    if value.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer or 'inf', got {value!r}")
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {number}")
    return number


def _unbounded(value: float) -> Optional[int]:
    return None if value == math.inf else int(value)


def add_decoder_arguments(parser: argparse.ArgumentParser) -> None:
    """Decoder options shared by the decode and sample subcommands."""
    group = parser.add_argument_group("Decoder")
    group.add_argument("--beam", type=_bound, help="Beam cutoff (integer or inf)")
    group.add_argument(
        "--pqlimit", type=_bound, help="Priority queue insertion limit (integer or inf)"
    )
    group.add_argument("--det-penalty", type=float, help="Queue penalty per residual detection")
    group.add_argument(
        "--no-revisit", action="store_true", help="Skip nodes whose residual was already visited"
    )
    group.add_argument(
        "--at-most-two", action="store_true", help="Allow at most two chosen errors per detector"
    )
    group.add_argument(
        "--beam-climbing", type=int, metavar="B", help="Climb beams 0..B across attempts"
    )
    group.add_argument("--num-orderings", type=int, help="Number of detector orderings to try")
    group.add_argument(
        "--preset", choices=[p.value for p in PresetName], help="Named ensemble preset"
    )
    group.add_argument(
        "--seed",
        type=int,
        help="Random seed",
        default=int(os.environ.get("MLE_DECODER_SEED", "0")),
    )
    group.add_argument(
        "--threads",
        type=int,
        help="Worker threads (parallel across shots)",
        default=int(os.environ.get("MLE_DECODER_THREADS", "1")),
    )
    group.add_argument(
        "--timing", action="store_true", help="Include wall-clock timings in the statistics"
    )


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(prog="mle-decoder", description="Most-likely-error decoder")
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug logging",
        default=os.environ.get("MLE_DECODER_DEBUG", "false").lower() == "true",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # decode
    decode_parser = subparsers.add_parser("decode", help="Decode a shot file against a DEM")
    decode_parser.add_argument("--dem", required=True, help="Detector error model file")
    decode_parser.add_argument("--in", dest="in_path", required=True, help="Shot file")
    decode_parser.add_argument(
        "--in-format", choices=[f.value for f in ShotFormat], default=ShotFormat.DETS.value
    )
    decode_parser.add_argument("--out", help="Prediction output file (default: stdout)")
    decode_parser.add_argument("--stats", help="Write aggregate statistics JSON here")
    decode_parser.add_argument("--obs-in", help="True observable flips per shot (b01)")
    decode_parser.add_argument("--rounds", type=int, default=1, help="Rounds per shot")
    add_decoder_arguments(decode_parser)
    decode_parser.set_defaults(handler=cmd_decode)

    # sample
    sample_parser = subparsers.add_parser("sample", help="Sample and decode shots")
    sample_parser.add_argument("--dem", required=True, help="Detector error model file")
    sample_parser.add_argument("--shots", type=int, required=True, help="Number of shots")
    sample_parser.add_argument("--rounds", type=int, default=1, help="Rounds per shot")
    sample_parser.add_argument(
        "--oracle",
        choices=[DecoderKind.BRUTE.value, DecoderKind.DIJKSTRA.value, DecoderKind.ASTAR.value],
        default=DecoderKind.ASTAR.value,
        help="Decoder to run",
    )
    sample_parser.add_argument("--csv", help="Append a result row to this CSV file")
    sample_parser.add_argument("--label", help="Model name for the CSV row (default: file stem)")
    sample_parser.add_argument("--p-label", type=float, help="Noise strength for the CSV row")
    sample_parser.add_argument("--shots-out", help="Write the sampled syndromes to this file")
    sample_parser.add_argument(
        "--shots-out-format", choices=[f.value for f in ShotFormat], default=ShotFormat.DETS.value
    )
    sample_parser.add_argument("--obs-out", help="Write the sampled observable flips (b01)")
    add_decoder_arguments(sample_parser)
    sample_parser.set_defaults(handler=cmd_sample)

    # gen
    gen_parser = subparsers.add_parser("gen", help="Generate a benchmark DEM")
    gen_parser.add_argument("--family", choices=["rep", "surface", "random"], required=True)
    gen_parser.add_argument("--distance", type=int, default=3)
    gen_parser.add_argument("--p", type=float, default=0.1, help="Channel probability")
    gen_parser.add_argument("--num-errors", type=int, default=10)
    gen_parser.add_argument("--num-detectors", type=int, default=6)
    gen_parser.add_argument("--max-row-weight", type=int, default=3)
    gen_parser.add_argument("--p-min", type=float, default=0.01)
    gen_parser.add_argument("--p-max", type=float, default=0.1)
    gen_parser.add_argument(
        "--seed", type=int, default=int(os.environ.get("MLE_DECODER_SEED", "0"))
    )
    gen_parser.add_argument("--out", help="Output DEM file (default: stdout)")
    gen_parser.set_defaults(handler=cmd_gen)

    return parser.parse_args(argv)


def create_decoder_config(
    args: argparse.Namespace, kind: Optional[DecoderKind] = None
) -> DecoderConfig:
    """
    Create the decoder configuration from command-line arguments.

    A preset supplies defaults; explicit flags override them. Any of
    --preset, --beam-climbing or --num-orderings selects the ensemble.

    Raises:
        ValueError: If a value is out of range.
    """
    ensemble: Optional[EnsembleConfig] = None
    if args.preset:
        ensemble = preset_config(PresetName(args.preset), seed=args.seed)
        base = ensemble.base_config
    else:
        base = SearchConfig(rng_seed=args.seed)

    overrides: Dict[str, Any] = {}
    if args.beam is not None:
        overrides["beam"] = _unbounded(args.beam)
    if args.pqlimit is not None:
        overrides["pqlimit"] = _unbounded(args.pqlimit)
    if args.det_penalty is not None:
        overrides["det_penalty"] = args.det_penalty
    if args.no_revisit:
        overrides["no_revisit"] = True
    if args.at_most_two:
        overrides["at_most_two"] = True
    search = SearchConfig(**{**base.model_dump(), **overrides})

    if kind in (DecoderKind.BRUTE, DecoderKind.DIJKSTRA):
        return DecoderConfig(kind=kind, search=search)

    if ensemble is not None or args.beam_climbing is not None or args.num_orderings is not None:
        climbing = ensemble.beam_climbing if ensemble else args.beam_climbing is not None
        max_beam = ensemble.max_beam if ensemble else 0
        if args.beam_climbing is not None:
            max_beam, climbing = args.beam_climbing, True
        num_orderings = args.num_orderings
        if num_orderings is None:
            num_orderings = ensemble.num_orderings if ensemble else max_beam + 1
        ensemble = EnsembleConfig(
            max_beam=max_beam,
            num_orderings=num_orderings,
            beam_climbing=climbing,
            base_config=search,
            seed=args.seed,
        )
        return DecoderConfig(kind=DecoderKind.ENSEMBLE, search=search, ensemble=ensemble)
    return DecoderConfig(kind=DecoderKind.ASTAR, search=search)


def _warn_missing_coords(model: ErrorModel, config: DecoderConfig) -> None:
    if config.kind != DecoderKind.ENSEMBLE or not model.num_detectors:
        return
    if not model.has_complete_coords:
        logger.warning("Model lacks complete detector coordinates; ensemble uses random orderings")


def stats_record(
    stats: Optional[ShotStats],
    shots: int,
    low_confidence: int,
    nodes_expanded: int,
    wall_time_s: float,
    timing: bool,
) -> Dict[str, Any]:
    """The fixed-key statistics record written by decode and sample."""
    return {
        "shots": shots,
        "errors": stats.errors if stats else None,
        "low_confidence": low_confidence,
        "per_shot": stats.per_shot_rate if stats else None,
        "per_round": stats.per_round_rate if stats else None,
        "ci90_per_shot": list(stats.ci90_per_shot) if stats else None,
        "ci90_per_round": list(stats.ci90_per_round) if stats and stats.ci90_per_round else None,
        "nodes_expanded_total": nodes_expanded,
        "wall_time_us_total": round(wall_time_s * 1e6, 3) if timing else None,
    }


def _dump_json(record: Dict[str, Any]) -> str:
    return json.dumps(record, indent=2) + "\n"


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_decode(args: argparse.Namespace) -> int:
    """Decode every shot of a file and write one prediction line per shot."""
    model = load_model(args.dem)
    config = create_decoder_config(args)
    _warn_missing_coords(model, config)

    with open(args.in_path, "r", encoding="utf-8") as f:
        syndromes = read_syndromes(f.read(), ShotFormat(args.in_format), model.num_detectors)
    truth: Optional[List[int]] = None
    if args.obs_in:
        with open(args.obs_in, "r", encoding="utf-8") as f:
            truth = read_observables(f.read(), model.num_observables)
        if len(truth) != len(syndromes):
            raise ValueError(
                f"{args.obs_in} has {len(truth)} shots but {args.in_path} has {len(syndromes)}"
            )

    lines: List[str] = []
    times: List[float] = []
    low_confidence = 0
    nodes = 0
    errors = 0
    results = decode_all(model, syndromes, build_decoder(config), args.threads)
    for i, (outcome, elapsed) in enumerate(results):
        times.append(elapsed)
        nodes += outcome.stats.nodes_expanded
        if outcome.low_confidence:
            low_confidence += 1
            errors += 1
            lines.append(LOW_CONFIDENCE)
            continue
        if truth is not None and outcome.predicted_observables != truth[i]:
            errors += 1
        lines.append(format_bits(outcome.predicted_observables, model.num_observables))

    _emit("".join(line + "\n" for line in lines), args.out)
    logger.info(f"Decoded {len(lines)} shots ({low_confidence} low-confidence)")

    if args.stats:
        stats = None
        if truth is not None and syndromes:
            stats = summarize(len(syndromes), errors, args.rounds, low_confidence, nodes, times)
        record = stats_record(stats, len(syndromes), low_confidence, nodes, sum(times), args.timing)
        _emit(_dump_json(record), args.stats)
    return 0


def _uniform_probability(model: ErrorModel) -> Optional[float]:
    probabilities = {c.probability for c in model.channels}
    return probabilities.pop() if len(probabilities) == 1 else None


def _append_csv(path: str, row: Dict[str, Any]) -> None:
    is_new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        if is_new:
            writer.writeheader()
        writer.writerow(row)


def _write_sampled_shots(model: ErrorModel, args: argparse.Namespace) -> None:
    # Same per-shot streams as run_experiment, so the files hold the decoded shots
    shots = [sample_shot(model, shot_rng(args.seed, i)) for i in range(args.shots)]
    if args.shots_out:
        text = write_syndromes(
            [s.syndrome for s in shots], ShotFormat(args.shots_out_format), model.num_detectors
        )
        Path(args.shots_out).write_text(text, encoding="utf-8")
    if args.obs_out:
        text = write_observables([s.true_observables for s in shots], model.num_observables)
        Path(args.obs_out).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {len(shots)} sampled shots")


def cmd_sample(args: argparse.Namespace) -> int:
    """Run a sampling experiment and print its statistics."""
    model = load_model(args.dem)
    config = create_decoder_config(args, DecoderKind(args.oracle))
    _warn_missing_coords(model, config)

    stats = run_experiment(
        model, args.shots, rounds=args.rounds, decoder=config, seed=args.seed, threads=args.threads
    )
    record = stats_record(
        stats,
        stats.shots,
        stats.low_confidence_count,
        stats.nodes_expanded_total,
        stats.timing.total_decode_s,
        args.timing,
    )
    sys.stdout.write(_dump_json(record))
    if args.shots_out or args.obs_out:
        _write_sampled_shots(model, args)

    if args.csv:
        p_label = args.p_label if args.p_label is not None else _uniform_probability(model)
        ci = stats.ci90_per_round
        _append_csv(
            args.csv,
            {
                "model": args.label or Path(args.dem).stem,
                "p": "" if p_label is None else p_label,
                "decoder": describe(config),
                "shots": stats.shots,
                "errors": stats.errors,
                "per_shot": stats.per_shot_rate,
                "per_round": "" if stats.per_round_rate is None else stats.per_round_rate,
                "ci_lo": "" if ci is None else ci[0],
                "ci_hi": "" if ci is None else ci[1],
                "mean_decode_us": stats.timing.mean_decode_us if args.timing else "",
            },
        )
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate a benchmark model and write it as DEM text."""
    if args.family == "rep":
        model = gen_repetition_code(args.distance, args.p)
    elif args.family == "surface":
        model = gen_surface_code_capacity(args.distance, args.p)
    else:
        model = gen_random_ldpc(
            args.num_errors,
            args.num_detectors,
            args.max_row_weight,
            (args.p_min, args.p_max),
            args.seed,
        )
    if args.out:
        dump_model(model, args.out)
        logger.info(f"Wrote {model.num_channels} channels to {args.out}")
    else:
        sys.stdout.write(serialize_dem(model_to_program(model)))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the CLI."""
    # Load environment variables from .env file
    load_dotenv()

    args = parse_args(argv)
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.debug("Debug logging enabled.")
    else:
        logging.getLogger().setLevel(logging.INFO)

    try:
        return args.handler(args)

    except (ValueError, OSError, DecoderError) as e:
        logger.error(f"Input error: {e}")
        return 2

    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

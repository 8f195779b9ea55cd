"""
End-to-end pipelines behind ``python -m src``.

Modes:
    count     compute (or resume) the a_p cache of a curve
    identify  classify an EndoData file and build its Sato-Tate model
    compare   match the curve's moment statistics against candidate groups
    sample    Monte Carlo moments of candidate groups next to their exact values
"""

import argparse
import logging
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .caching import ApCache
from .catalog import GENERA, ComponentTag
from .config import RunConfig, load_config
from .endo_group import GroupIdentification, classify, load_endo_data
from .errors import (
    EXIT_OK,
    EmbeddingError,
    InsufficientDataError,
    InvalidEndoDataError,
    SatoTateError,
)
from .lpoly import ApSequence, CurveSpec, ap_sequence
from .monitoring import PerformanceMonitor, init_logging, log_run_summary, structured_log
from .st_group import (
    STModel,
    coefficient_stats,
    model_from_id,
    model_from_identification,
    sample_coefficients,
)
from .stats import (
    MIN_MATCH_SAMPLES,
    MatchVerdict,
    MomentReport,
    empirical_moments,
    match,
    write_histogram,
    write_report,
    write_verdict,
)

logger = logging.getLogger(__name__)

DEFAULT_CANDIDATES: Dict[int, Tuple[str, ...]] = {
    1: ("U1", "N(U1)", "SU2"),
    2: ("USp4", "SU2xSU2", "U1xSU2"),
    3: ("USp6", "SU2diag", "U1"),
}


def cache_path(out_dir: Path, curve: CurveSpec) -> Path:
    """Cache file for ``curve`` under ``out_dir``."""
    slug = re.sub(r"[^0-9A-Za-z]+", "_", curve.canonical()).strip("_")
    return out_dir / f"ap_{slug}.txt"


def count_to_cache(
    curve: CurveSpec, bound: int, out_dir: Path, workers: int = 1, seed: int = 0
) -> Tuple[Path, ApSequence]:
    """Resume the curve's cache up to ``bound``; one cached entry is re-derived first."""
    cache = ApCache(cache_path(out_dir, curve), curve)
    if len(cache):
        cache.verify_random(np.random.default_rng(seed))
    monitor = PerformanceMonitor()
    sequence = ap_sequence(
        curve,
        bound,
        trace_only=curve.genus == 3,
        workers=workers,
        cache=cache,
        monitor=monitor,
    )
    path = cache.flush()
    log_run_summary(monitor, curve=curve.canonical(), bound=bound, cache=str(path))
    return path, sequence


def run_count(config: RunConfig) -> Path:
    """Count a_p up to the configured bound and return the cache path."""
    curve = CurveSpec.parse(config.curve)
    path, _ = count_to_cache(curve, config.bound, config.out_dir, config.workers, config.seed)
    return path


def identification_line(identification: GroupIdentification) -> str:
    """One-line summary printed by identify mode."""
    line = (
        f"{identification.identity_component_id.value}, dim {identification.lie_dim}, "
        f"pi0 {identification.component_group.order}, theorem {identification.applicable_theorem}"
    )
    return line if identification.verified else line + " (unverified)"


def _identify(endo_path: str) -> Tuple[GroupIdentification, Optional[STModel]]:
    data, albert = load_endo_data(endo_path)
    if albert is None:
        raise InvalidEndoDataError(f"{endo_path} has no [albert] section")
    identification = classify(data, albert)
    try:
        model = model_from_identification(identification)
    except EmbeddingError as exc:
        logger.warning("no Sato-Tate model built: %s", exc)
        model = None
    return identification, model


def run_identify(config: RunConfig) -> Tuple[GroupIdentification, Optional[STModel]]:
    """Classify the EndoData file and write identification.txt."""
    identification, model = _identify(config.endo)
    line = identification_line(identification)
    print(line)
    lines = [line]
    if model is not None:
        lines.append(f"model={model.model_id} pi0_order={model.order}")
    out = config.out_dir / "identification.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    return identification, model


def candidate_models(config: RunConfig, g: int, extra: Sequence[STModel] = ()) -> List[STModel]:
    """Configured (or default) candidates for genus g, plus any extras not yet listed."""
    ids = config.candidates or list(DEFAULT_CANDIDATES[g])
    models = [model_from_id(model_id, g) for model_id in ids]
    known = {m.model_id for m in models}
    for model in extra:
        if model.model_id not in known:
            models.append(model)
            known.add(model.model_id)
    return models


def run_compare(config: RunConfig) -> MatchVerdict:
    """Match curve moments against candidate groups and write the report files."""
    curve = CurveSpec.parse(config.curve)
    _, sequence = count_to_cache(curve, config.bound, config.out_dir, config.workers, config.seed)
    if len(sequence) < MIN_MATCH_SAMPLES:
        raise InsufficientDataError(
            f"{len(sequence)} good primes up to {config.bound}; "
            f"at least {MIN_MATCH_SAMPLES} are needed"
        )
    extra: List[STModel] = []
    if config.endo:
        _, identified = _identify(config.endo)
        if identified is not None and identified.g == curve.genus:
            extra.append(identified)
    candidates = candidate_models(config, curve.genus, extra)

    report = empirical_moments(sequence.polys)
    verdict = match(report, candidates)
    best = next(m for m in candidates if m.model_id == verdict.best)
    simulated = coefficient_stats(
        sample_coefficients(best, config.seed, config.n, config.shard_size)
    )

    out = config.out_dir
    write_report(out / "moments.txt", report)
    write_report(out / "best_model_moments.txt", simulated)
    write_histogram(out / "histogram.csv", [poly.a1 for poly in sequence.polys], curve.genus)
    write_verdict(out / "verdict.txt", verdict)
    print(verdict.verdict_line())
    return verdict


def _sample_genus(config: RunConfig, model_id: str) -> int:
    if config.curve:
        return CurveSpec.parse(config.curve).genus
    tag_text = "U1" if model_id == "N(U1)" else model_id.partition("/")[0]
    try:
        return GENERA[ComponentTag(tag_text)][0]
    except ValueError:
        raise EmbeddingError(f"unknown group id {model_id!r}") from None


def run_sample(config: RunConfig) -> List[MomentReport]:
    """Sample each requested model and write sampled and exact reports."""
    models: List[STModel] = []
    if config.endo:
        _, identified = _identify(config.endo)
        if identified is None:
            raise EmbeddingError(f"{config.endo} has no built-in Sato-Tate model")
        models.append(identified)
    for model_id in config.candidates or ():
        models.append(model_from_id(model_id, _sample_genus(config, model_id)))

    reports = []
    for model in models:
        report = coefficient_stats(
            sample_coefficients(model, config.seed, config.n, config.shard_size)
        )
        slug = re.sub(r"[^0-9A-Za-z]+", "_", model.model_id).strip("_")
        write_report(config.out_dir / f"sample_{slug}.txt", report)
        write_report(config.out_dir / f"exact_{slug}.txt", model.exact_moments())
        print(f"{model.model_id}: M2={report.moment(2):.4f} M4={report.moment(4):.4f}")
        reports.append(report)
    return reports


PIPELINES = {
    "count": run_count,
    "identify": run_identify,
    "compare": run_compare,
    "sample": run_sample,
}


def build_parser() -> argparse.ArgumentParser:
    """Command-line flags; unset flags fall through to the config layers."""
    parser = argparse.ArgumentParser(
        prog="sato-tate", description="Sato-Tate groups and Frobenius statistics"
    )
    parser.add_argument("--mode", choices=sorted(PIPELINES), help="Pipeline to run")
    parser.add_argument("--curve", help="Curve model, e.g. 'y^2=x^3+x+1'")
    parser.add_argument("--endo", help="EndoData file")
    parser.add_argument("--bound", type=int, help="Largest prime counted")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--n", type=int, help="Monte Carlo sample count")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--workers", type=int, help="Counting threads")
    parser.add_argument("--candidates", help="Comma-separated candidate group ids")
    parser.add_argument("--log-level", dest="log_level", help="Log level")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {key: value for key, value in vars(args).items() if key != "config"}
    try:
        config = load_config(args.config, overrides=overrides)
        init_logging(config.log_level)
        structured_log("INFO", "run started", mode=config.mode, seed=config.seed)
        PIPELINES[config.mode](config)
    except SatoTateError as exc:
        logger.error("%s failed: %s", type(exc).__name__, exc)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return EXIT_OK

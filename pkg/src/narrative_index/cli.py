"""Pipeline orchestration: resumable stages behind one command.

Stages communicate through plain CSV files in the output directory, so
any stage can be rerun, inspected, or replaced by hand:

    extract    corpus.csv -> pairs.csv
    chain      pairs.csv -> chains.csv           (needs the provider)
    index      chains.csv -> indices.csv
    correlate  indices.csv + di.csv -> correlation_<kind>.csv x6
    report     correlations + indices + di -> heatmap_<kind>.svg, topk_<kind>.csv
    all        the five stages in sequence

Configuration comes from an optional key = value config file; every key
has a CLI flag of the same name and flags win. Each stage writes a
manifest_<stage>.json recording the semantic config, input digests and
row counts (plus timing, which reruns are allowed to differ on).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import default_clues_en, default_topics
from .analytics import (
    DIKind,
    correlate_all,
    load_di,
    read_correlation_csv,
    six_di_variants,
    write_correlation_csv,
)
from .chains import build_chains, read_chains_csv, write_chains_csv
from .corpus import load_corpus, load_vocabulary
from .embedding import (
    DEFAULT_DIM,
    EmbeddingProviderConfig,
    ProviderKind,
    embed_batch,
    parse_provider_kind,
)
from .errors import ConfigError, InputError, PipelineError, ProviderError
from .extraction import extract_all, load_clue_table, read_pairs_csv, write_pairs_csv
from .indexing import (
    DecayParams,
    LagUnit,
    build_all_series,
    read_indices_csv,
    write_indices_csv,
)
from .months import month_of, month_range
from .report import render_heatmap, top_k_series, write_topk_csv

ENDPOINT_ENV_VAR = "NARRATIVE_INDEX_ENDPOINT"

STAGES = ("extract", "chain", "index", "correlate", "report", "all")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_PROVIDER = 4

LAG_UNIT_NOTE = (
    "decay lag unit is 'months' by default: with b=0.065 a day-denominated lag "
    "halves the weight after roughly 61 days, while a month-denominated lag "
    "halves it after roughly 61 months (about five years), which is the "
    "intended decay horizon; pass --lag-unit days to evaluate day lags instead"
)


@dataclass
class PipelineConfig:
    corpus: Path | None = None
    topics: Path = field(default_factory=default_topics)
    clues: Path = field(default_factory=default_clues_en)
    di: Path | None = None
    out: Path = Path("out")
    threshold: float = 0.5
    a: float = 0.02
    b: float = 0.065
    lag_unit: LagUnit = LagUnit.MONTHS
    provider: ProviderKind = ProviderKind.BUILTIN
    endpoint: str | None = None
    dim: int = DEFAULT_DIM
    k: int = 4
    ingest: str = "strict"
    workers: int = 1
    window: int | None = None

    def validate(self) -> None:
        if not 0.0 < self.threshold <= 1.0:
            raise ConfigError(f"threshold must lie in (0, 1], got {self.threshold}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.k < 1:
            raise ConfigError(f"k must be at least 1, got {self.k}")
        if self.dim < 1:
            raise ConfigError(f"dim must be positive, got {self.dim}")
        if self.ingest not in ("strict", "lenient"):
            raise ConfigError(f"ingest must be 'strict' or 'lenient', got {self.ingest!r}")
        if self.window is not None and self.window < 0:
            raise ConfigError(f"window must be non-negative, got {self.window}")
        if not str(self.topics) or not str(self.clues) or not str(self.out):
            raise ConfigError("topics, clues and out paths must be non-empty")
        # Instantiating the provider config checks endpoint/kind consistency.
        self.provider_config()

    def provider_config(self) -> EmbeddingProviderConfig:
        return EmbeddingProviderConfig(
            kind=self.provider,
            endpoint=self.endpoint if self.provider is ProviderKind.EXTERNAL else None,
            dim=self.dim,
        )

    def decay_params(self) -> DecayParams:
        return DecayParams(a=self.a, b=self.b, lag_unit=self.lag_unit)

    def semantic_snapshot(self) -> dict:
        """Config as recorded in manifests: everything that shapes the artifacts.

        Knobs that cannot change artifact bytes are excluded -- workers
        (performance only) and the output directory the manifest already
        sits in -- so runs stay byte-comparable across parallelism and
        across output locations.
        """
        return {
            "corpus": str(self.corpus) if self.corpus else None,
            "topics": str(self.topics),
            "clues": str(self.clues),
            "di": str(self.di) if self.di else None,
            "threshold": self.threshold,
            "a": self.a,
            "b": self.b,
            "lag_unit": self.lag_unit.value,
            "provider": self.provider.value,
            "endpoint": self.endpoint,
            "dim": self.dim,
            "k": self.k,
            "ingest": self.ingest,
            "window": self.window,
        }


def _parse_config_value(key: str, value: str, config: PipelineConfig) -> None:
    value = value.strip().strip('"')
    if key in ("corpus", "topics", "clues", "di", "out"):
        setattr(config, key, Path(value))
    elif key == "threshold":
        config.threshold = float(value)
    elif key in ("a", "b"):
        setattr(config, key, float(value))
    elif key == "lag_unit":
        config.lag_unit = _parse_lag_unit(value)
    elif key == "provider":
        config.provider = parse_provider_kind(value)
    elif key == "endpoint":
        config.endpoint = value
    elif key in ("dim", "k", "workers", "window"):
        setattr(config, key, int(value))
    elif key == "ingest":
        config.ingest = value
    else:
        raise ConfigError(f"unknown config key {key!r}")


def _parse_lag_unit(raw: str) -> LagUnit:
    try:
        return LagUnit(raw.strip().lower())
    except ValueError:
        raise ConfigError(f"lag_unit must be 'months' or 'days', got {raw!r}") from None


def load_config_file(path: Path) -> PipelineConfig:
    """Parse a key = value config file (one pair per line, # comments)."""
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    config = PipelineConfig()
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        try:
            _parse_config_value(key.strip(), value, config)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}:{line_no}: {exc}") from None
    return config


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(
    config: PipelineConfig,
    stage: str,
    inputs: list[Path],
    counts: dict[str, int],
    started: float,
) -> None:
    def key(p: Path) -> str:
        # Stage intermediates live in the out dir; record them relative to it
        # so runs into different directories stay comparable.
        try:
            return str(p.relative_to(config.out))
        except ValueError:
            return str(p)

    manifest = {
        "stage": stage,
        "config": config.semantic_snapshot(),
        "inputs": {key(p): _sha256(p) for p in inputs if p and p.is_file()},
        "counts": counts,
        "notes": [LAG_UNIT_NOTE],
        "timing_seconds": round(time.monotonic() - started, 6),
    }
    path = config.out / f"manifest_{stage}.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _require(config: PipelineConfig, attr: str, stage: str) -> Path:
    value = getattr(config, attr)
    if value is None or not str(value):
        raise ConfigError(f"stage {stage!r} needs the {attr} path")
    return Path(value)


def stage_extract(config: PipelineConfig) -> None:
    started = time.monotonic()
    corpus_path = _require(config, "corpus", "extract")
    vocabulary = load_vocabulary(config.topics)
    clues = load_clue_table(config.clues)
    load = load_corpus(corpus_path, vocabulary, strict=config.ingest == "strict")
    if load.skipped:
        print(f"extract: skipped {load.skipped_count} rows with unknown topics", file=sys.stderr)
    pairs = extract_all(load.records, clues)
    config.out.mkdir(parents=True, exist_ok=True)
    write_pairs_csv(pairs, config.out / "pairs.csv")
    _write_manifest(
        config,
        "extract",
        [corpus_path, Path(config.topics), Path(config.clues)],
        {
            "records": len(load.records),
            "skipped_rows": load.skipped_count,
            "pairs": len(pairs),
        },
        started,
    )
    print(f"extract: {len(load.records)} records -> {len(pairs)} pairs")


def stage_chain(config: PipelineConfig) -> None:
    started = time.monotonic()
    pairs_path = config.out / "pairs.csv"
    pairs = read_pairs_csv(pairs_path)
    provider = config.provider_config()
    texts = [p.cause for p in pairs] + [p.effect for p in pairs]
    vectors = embed_batch(texts, provider)
    pair_vectors = {
        p.id: (vectors[i], vectors[len(pairs) + i]) for i, p in enumerate(pairs)
    }
    chains = build_chains(
        pairs,
        pair_vectors,
        threshold=config.threshold,
        window_months=config.window,
        workers=config.workers,
    )
    write_chains_csv(chains, config.out / "chains.csv")
    _write_manifest(
        config,
        "chain",
        [pairs_path],
        {"pairs": len(pairs), "chains": len(chains)},
        started,
    )
    print(f"chain: {len(pairs)} pairs -> {len(chains)} chains")


def stage_index(config: PipelineConfig) -> None:
    started = time.monotonic()
    chains_path = config.out / "chains.csv"
    chains = read_chains_csv(chains_path)
    vocabulary = load_vocabulary(config.topics)
    corpus_path = _require(config, "corpus", "index")
    load = load_corpus(corpus_path, vocabulary, strict=config.ingest == "strict")
    record_months = sorted({month_of(r.date) for r in load.records})
    months = month_range(record_months[0], record_months[-1]) if record_months else []
    series = build_all_series(
        chains,
        vocabulary,
        config.decay_params(),
        months=months,
        workers=config.workers,
    )
    write_indices_csv(series, config.out / "indices.csv")
    _write_manifest(
        config,
        "index",
        [chains_path, corpus_path, Path(config.topics)],
        {"chains": len(chains), "series": len(series), "months": len(months)},
        started,
    )
    print(f"index: {len(chains)} chains -> {len(series)} series over {len(months)} months")


def stage_correlate(config: PipelineConfig) -> None:
    started = time.monotonic()
    indices_path = config.out / "indices.csv"
    series = read_indices_csv(indices_path)
    vocabulary = load_vocabulary(config.topics)
    expected_pairs = vocabulary.ordered_pairs()
    if [s.topic_pair for s in series] != expected_pairs:
        raise InputError("indices.csv series do not match the topic vocabulary order")
    di_path = _require(config, "di", "correlate")
    leading, coincident, lagging = load_di(di_path)
    variants = six_di_variants(leading, coincident, lagging)
    matrices = correlate_all(series, variants, vocabulary, workers=config.workers)
    defined = 0
    for matrix in matrices:
        write_correlation_csv(matrix, config.out / f"correlation_{matrix.di_kind.value}.csv")
        defined += len(matrix.defined_cells())
    _write_manifest(
        config,
        "correlate",
        [indices_path, di_path, Path(config.topics)],
        {"series": len(series), "matrices": len(matrices), "defined_cells": defined},
        started,
    )
    print(f"correlate: {len(series)} series x {len(matrices)} DI variants")


def stage_report(config: PipelineConfig) -> None:
    started = time.monotonic()
    indices_path = config.out / "indices.csv"
    series = read_indices_csv(indices_path)
    di_path = _require(config, "di", "report")
    leading, coincident, lagging = load_di(di_path)
    variants = {v.kind: v for v in six_di_variants(leading, coincident, lagging)}
    inputs = [indices_path, di_path]
    rendered = 0
    for kind in DIKind:
        matrix_path = config.out / f"correlation_{kind.value}.csv"
        matrix = read_correlation_csv(matrix_path, kind)
        inputs.append(matrix_path)
        render_heatmap(matrix, config.out / f"heatmap_{kind.value}.svg")
        table = top_k_series(matrix, series, variants[kind], k=config.k)
        write_topk_csv(table, config.out / f"topk_{kind.value}.csv")
        rendered += 1
    _write_manifest(
        config,
        "report",
        inputs,
        {"heatmaps": rendered, "topk_tables": rendered},
        started,
    )
    print(f"report: {rendered} heatmaps and top-{config.k} tables")


_STAGE_FUNCTIONS = {
    "extract": stage_extract,
    "chain": stage_chain,
    "index": stage_index,
    "correlate": stage_correlate,
    "report": stage_report,
}


def run_stage(stage: str, config: PipelineConfig) -> int:
    """Run one stage (or 'all'); returns a process exit status."""
    try:
        config.validate()
        config.out.mkdir(parents=True, exist_ok=True)
        if stage == "all":
            for name in ("extract", "chain", "index", "correlate", "report"):
                _STAGE_FUNCTIONS[name](config)
        elif stage in _STAGE_FUNCTIONS:
            _STAGE_FUNCTIONS[stage](config)
        else:
            raise ConfigError(f"unknown stage {stage!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="narrative-index",
        description="Extract causal pairs, chain them across topics, index and correlate.",
    )
    parser.add_argument("stage", choices=STAGES)
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--corpus", type=Path)
    parser.add_argument("--topics", type=Path)
    parser.add_argument("--clues", type=Path)
    parser.add_argument("--di", type=Path)
    parser.add_argument("--out", type=Path)
    parser.add_argument("--threshold", type=float)
    parser.add_argument("--a", type=float, dest="a")
    parser.add_argument("--b", type=float, dest="b")
    parser.add_argument("--lag-unit", choices=["months", "days"])
    parser.add_argument("--provider", choices=["builtin", "external"])
    parser.add_argument("--endpoint")
    parser.add_argument("--dim", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--ingest", choices=["strict", "lenient"])
    parser.add_argument("--workers", type=int)
    parser.add_argument("--window", type=int)
    return parser


def _apply_flags(config: PipelineConfig, args: argparse.Namespace) -> None:
    for attr in ("corpus", "topics", "clues", "di", "out"):
        value = getattr(args, attr)
        if value is not None:
            setattr(config, attr, value)
    for attr in ("threshold", "a", "b", "dim", "k", "ingest", "workers", "window"):
        value = getattr(args, attr)
        if value is not None:
            setattr(config, attr, value)
    if args.lag_unit is not None:
        config.lag_unit = _parse_lag_unit(args.lag_unit)
    if args.provider is not None:
        config.provider = parse_provider_kind(args.provider)
    if args.endpoint is not None:
        config.endpoint = args.endpoint
    elif config.endpoint is None and os.environ.get(ENDPOINT_ENV_VAR):
        config.endpoint = os.environ[ENDPOINT_ENV_VAR]


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config_file(args.config) if args.config else PipelineConfig()
        _apply_flags(config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run_stage(args.stage, config)


if __name__ == "__main__":
    sys.exit(main())

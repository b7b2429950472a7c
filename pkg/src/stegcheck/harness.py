"""Experiment configuration and the directory-level pipelines behind the CLI.

An experiment file is a YAML document made of flat sections (`run`, `train`, `test`,
`features`, `ensemble`) mapping keys to scalars or lists of scalars. Unknown sections or
keys, duplicated keys, nested mappings and ill-typed values are rejected with the line
they appear on. Missing keys take their value from `templates/default_config.yaml`.

Every random decision of an experiment is keyed by `derive_seed(master_seed, *role)`:

- `("corpus", "train")` and `("corpus", "test")` for synthetic corpora;
- `("split",)` to partition a directory shared by training and testing, or
  `("split", "train")` / `("split", "test")` to sample two distinct directories;
- `("train-split",)`, `("embed", "train-a", i)` and `("embed", "train-b", i)` for the
  training pair;
- `("embed", "test-stego", i)` for stego test images and `("embed", "test-b", i)` for
  the test `B` set;
- `("ensemble",)` for the ensemble seed.

Two runs writing to the same output directory at the same time are not supported: the
directory is locked for the duration of a run.
"""
import csv
import shutil
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import yaml
from filelock import FileLock, Timeout

from .constants import (
    ALGORITHMS,
    CONFIG_ECHO_NAME,
    COVER_FILENAME_TEMPLATE,
    EXPERIMENT_PREFIX_HEADER,
    LABEL_COVER,
    LABEL_STEGO,
    LOCK_NAME,
    MANIFEST_NAME,
    MODELS_DIRNAME,
    REPORT_NAME,
    VERDICTS_NAME,
)
from .detector import (
    DetectionReport,
    DetectorModels,
    ImageVerdict,
    analyze,
    build_test_pair,
    build_train_pair,
    load_detectors,
    save_detectors,
    summarize,
    train_detectors,
    write_report_csv,
    write_verdicts_csv,
)
from .embedding import ChangeStats, EmbedConfig, count_changes, embed
from .ensemble import EcConfig
from .features import FeatureConfig, extract_features_batch, write_feature_csv
from .image_core import ImageGray, read_pgm, write_pgm
from .synth_corpus import generate_corpus, load_presets
from .utils import (
    ConfigError,
    EmptyDatasetError,
    OutputDirLockedError,
    UnmatchedFilesError,
    derive_seed,
    list_images,
    logging,
    make_generator,
    split_seed,
    tqdm,
    validate_seed,
    validate_stegcheck_args,
)


logger = logging.get_logger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent / "templates" / "default_config.yaml"

CLASSIFIER_NAME = "EC"

_INT = "int"
_FLOAT = "float"
_BOOL = "bool"
_STR = "str"

# section -> key -> (type, nullable, is_list)
_SCHEMA: Dict[str, Dict[str, Tuple[str, bool, bool]]] = {
    "run": {
        "name": (_STR, False, False),
        "master_seed": (_INT, False, False),
        "output_dir": (_STR, False, False),
        "width": (_INT, False, False),
        "height": (_INT, False, False),
    },
    "train": {
        "source": (_STR, False, False),
        "n_covers": (_INT, False, False),
        "algorithm": (_STR, False, False),
        "rate": (_FLOAT, False, False),
    },
    "test": {
        "source": (_STR, False, False),
        "n_cover": (_INT, False, False),
        "n_stego": (_INT, False, False),
        "algorithm": (_STR, False, False),
        "rate": (_FLOAT, False, False),
        "ratios": (_STR, True, True),
    },
    "features": {
        "residual_kinds": (_STR, False, True),
        "quantizations": (_INT, False, True),
        "truncation": (_INT, False, False),
        "cooc_order": (_INT, False, False),
        "directions": (_STR, False, True),
        "normalize": (_BOOL, False, False),
    },
    "ensemble": {
        "n_learners": (_INT, False, False),
        "subspace_dim": (_INT, True, False),
        "reg_eps": (_FLOAT, True, False),
        "bootstrap": (_BOOL, False, False),
        "search_subspace": (_BOOL, False, False),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment depends on.

    `train_source` and `test_source` are preset names (see
    [`~synth_corpus.load_presets`]) or directories of PGM images. `ratios` lists the
    `(covers, stego)` subsets of the test pool that get a report row each; it defaults
    to `[(n_test_cover, n_test_stego)]`.
    """

    train_source: str
    test_source: str
    n_train_covers: int
    n_test_cover: int
    n_test_stego: int
    train_embed: EmbedConfig
    test_embed: EmbedConfig
    feature_cfg: FeatureConfig
    ec_cfg: EcConfig
    master_seed: int
    output_dir: Path
    name: str = "1"
    width: int = 128
    height: int = 128
    ratios: List[Tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if self.n_train_covers < 2:
            raise ValueError(f"n_covers must be >= 2, got {self.n_train_covers}.")
        if self.n_test_cover < 0 or self.n_test_stego < 0:
            raise ValueError("Test counts must be >= 0.")
        if not self.ratios:
            object.__setattr__(self, "ratios", [(self.n_test_cover, self.n_test_stego)])
        for n_cover, n_stego in self.ratios:
            if n_cover < 0 or n_stego < 0 or n_cover + n_stego < 1:
                raise ValueError(
                    f"Test subset {n_cover}/{n_stego} must hold at least one image."
                )
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    def with_overrides(
        self,
        master_seed: Optional[int] = None,
        output_dir: Optional[Union[str, Path]] = None,
    ) -> "ExperimentConfig":
        """Copy with another master seed (and the ensemble seed derived from it) or
        output directory."""
        changes: Dict[str, Any] = {}
        if master_seed is not None:
            validate_seed(master_seed)
            changes["master_seed"] = master_seed
            changes["ec_cfg"] = replace(
                self.ec_cfg, seed=derive_seed(master_seed, "ensemble")
            )
        if output_dir is not None:
            changes["output_dir"] = Path(output_dir)
        return replace(self, **changes)

    @property
    def pool_covers(self) -> int:
        return max(n_cover for n_cover, _ in self.ratios)

    @property
    def pool_stego(self) -> int:
        return max(n_stego for _, n_stego in self.ratios)

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        """Sections as written in an experiment file."""
        features = self.feature_cfg.to_dict()
        ensemble = self.ec_cfg.to_dict()
        ensemble.pop("seed")
        return {
            "run": {
                "name": self.name,
                "master_seed": self.master_seed,
                "output_dir": str(self.output_dir),
                "width": self.width,
                "height": self.height,
            },
            "train": {
                "source": self.train_source,
                "n_covers": self.n_train_covers,
                "algorithm": self.train_embed.algorithm,
                "rate": self.train_embed.rate,
            },
            "test": {
                "source": self.test_source,
                "n_cover": self.n_test_cover,
                "n_stego": self.n_test_stego,
                "algorithm": self.test_embed.algorithm,
                "rate": self.test_embed.rate,
                "ratios": [f"{c}/{s}" for c, s in self.ratios],
            },
            "features": {
                key: list(value) if isinstance(value, tuple) else value
                for key, value in features.items()
            },
            "ensemble": ensemble,
        }


def _check_type(value: Any, kind: str) -> bool:
    if kind == _BOOL:
        return isinstance(value, bool)
    if kind == _INT:
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == _FLOAT:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, str)


def _validate_value(section: str, key: str, value: Any, line: int) -> Any:
    kind, nullable, is_list = _SCHEMA[section][key]
    if value is None:
        if nullable:
            return None
        raise ConfigError(f"'{section}.{key}' cannot be null.", line)
    if is_list:
        if not isinstance(value, list):
            raise ConfigError(f"'{section}.{key}' must be a list of {kind}.", line)
        for item in value:
            if not _check_type(item, kind):
                raise ConfigError(
                    f"'{section}.{key}' must be a list of {kind}, got {item!r}.", line
                )
        return value
    if not _check_type(value, kind):
        raise ConfigError(
            f"'{section}.{key}' must be of type {kind}, got {type(value).__name__}.",
            line,
        )
    return float(value) if kind == _FLOAT else value


def _parse_sections(text: str) -> Tuple[Dict[str, Dict[str, Any]], Dict[str, int]]:
    """Parse and validate an experiment document.

    Returns the values per section and the 1-based line of every `section.key` (and of
    every section header).
    """
    loader = yaml.SafeLoader(text)
    try:
        root = loader.get_single_node()
        if root is None:
            return {}, {}
        if not isinstance(root, yaml.MappingNode):
            raise ConfigError(
                "An experiment file must be a mapping of sections.",
                root.start_mark.line + 1,
            )
        values: Dict[str, Dict[str, Any]] = {}
        lines: Dict[str, int] = {}
        for section_node, body_node in root.value:
            line = section_node.start_mark.line + 1
            section = loader.construct_object(section_node)
            if section not in _SCHEMA:
                raise ConfigError(f"Unknown section '{section}'.", line)
            if section in values:
                raise ConfigError(f"Duplicate section '{section}'.", line)
            values[section], lines[section] = {}, line
            is_null = isinstance(body_node, yaml.ScalarNode) and body_node.tag.endswith(
                ":null"
            )
            if is_null:
                continue
            if not isinstance(body_node, yaml.MappingNode):
                raise ConfigError(f"Section '{section}' must be a mapping.", line)
            for key_node, value_node in body_node.value:
                line = key_node.start_mark.line + 1
                key = loader.construct_object(key_node)
                if key not in _SCHEMA[section]:
                    raise ConfigError(
                        f"Unknown key '{key}' in section '{section}'.", line
                    )
                if key in values[section]:
                    raise ConfigError(
                        f"Duplicate key '{key}' in section '{section}'.", line
                    )
                if isinstance(value_node, yaml.MappingNode):
                    raise ConfigError(
                        f"'{section}.{key}' must be a scalar or a flat list.", line
                    )
                if isinstance(value_node, yaml.SequenceNode) and any(
                    not isinstance(item, yaml.ScalarNode) for item in value_node.value
                ):
                    raise ConfigError(f"'{section}.{key}' must be a flat list.", line)
                value = loader.construct_object(value_node, deep=True)
                values[section][key] = _validate_value(section, key, value, line)
                lines[f"{section}.{key}"] = line
        return values, lines
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        raise ConfigError(
            f"Invalid YAML: {e.problem}", mark.line + 1 if mark else None
        ) from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML: {e}") from e
    finally:
        loader.dispose()


def _parse_ratio(ratio: str, line: Optional[int]) -> Tuple[int, int]:
    parts = ratio.split("/")
    if len(parts) != 2 or not all(part.strip().isdigit() for part in parts):
        raise ConfigError(
            f"Test ratio '{ratio}' must be written 'covers/stego', e.g. '100/50'.", line
        )
    return int(parts[0]), int(parts[1])


def _build(
    values: Dict[str, Dict[str, Any]], lines: Dict[str, int]
) -> ExperimentConfig:
    def line_of(section: str, key: Optional[str] = None) -> Optional[int]:
        if key is not None and f"{section}.{key}" in lines:
            return lines[f"{section}.{key}"]
        return lines.get(section)

    run, train, test = values["run"], values["train"], values["test"]

    def _make(cls, section: str, key: Optional[str], **kwargs):
        try:
            return cls(**kwargs)
        except ValueError as e:
            raise ConfigError(
                f"Invalid '{section}' section: {e}", line_of(section, key)
            ) from e

    master_seed = run["master_seed"]
    if not 0 <= master_seed < 2**64:
        raise ConfigError(
            "'run.master_seed' must be in [0, 2**64).", line_of("run", "master_seed")
        )
    for section in ("train", "test"):
        if values[section]["algorithm"] not in ALGORITHMS:
            raise ConfigError(
                f"'{section}.algorithm' must be one of {ALGORITHMS}.",
                line_of(section, "algorithm"),
            )
    train_embed = _make(
        EmbedConfig, "train", "rate", algorithm=train["algorithm"], rate=train["rate"]
    )
    test_embed = _make(
        EmbedConfig, "test", "rate", algorithm=test["algorithm"], rate=test["rate"]
    )
    feature_cfg = _make(FeatureConfig, "features", None, **values["features"])
    ec_cfg = _make(
        EcConfig,
        "ensemble",
        None,
        seed=derive_seed(master_seed, "ensemble"),
        **values["ensemble"],
    )
    ratios = [
        _parse_ratio(ratio, line_of("test", "ratios")) for ratio in test["ratios"] or []
    ]
    return _make(
        ExperimentConfig,
        "test",
        None,
        train_source=train["source"],
        test_source=test["source"],
        n_train_covers=train["n_covers"],
        n_test_cover=test["n_cover"],
        n_test_stego=test["n_stego"],
        train_embed=train_embed,
        test_embed=test_embed,
        feature_cfg=feature_cfg,
        ec_cfg=ec_cfg,
        master_seed=master_seed,
        output_dir=Path(run["output_dir"]),
        name=run["name"],
        width=run["width"],
        height=run["height"],
        ratios=ratios,
    )


def parse_experiment_config(text: str) -> ExperimentConfig:
    """Parse an experiment document, filling missing keys from the default config.

    Raises:
        [`~utils.ConfigError`]: with the offending line number.
    """
    with open(DEFAULT_CONFIG_PATH, "r", encoding="utf-8") as f:
        values, _ = _parse_sections(f.read())
    user_values, lines = _parse_sections(text)
    for section, section_values in user_values.items():
        values[section].update(section_values)
    return _build(values, lines)


def load_experiment_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """Load an experiment file, or the default configuration without `path`."""
    if path is None:
        return parse_experiment_config("")
    return parse_experiment_config(Path(path).read_text(encoding="utf-8"))


def dump_experiment_config(cfg: ExperimentConfig, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(cfg.to_dict(), f, sort_keys=False)


@contextmanager
def locked_output_dir(directory: Union[str, Path]) -> Iterator[Path]:
    """Create `directory` and hold an exclusive lock on it.

    Raises:
        [`~utils.OutputDirLockedError`]: another run holds the lock.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(directory / LOCK_NAME))
    try:
        lock.acquire(timeout=0)
    except Timeout as e:
        raise OutputDirLockedError(
            f"Output directory '{directory}' is in use by another run."
        ) from e
    try:
        yield directory
    finally:
        lock.release()


def read_directory(directory: Union[str, Path]) -> Tuple[List[ImageGray], List[str]]:
    """All PGM images of `directory`, sorted by file name, and their names."""
    paths = list_images(directory)
    images = [read_pgm(path) for path in tqdm(paths, desc="read", unit="img")]
    return images, [path.name for path in paths]


def _shuffled(
    images: List[ImageGray], names: List[str], seed: int
) -> Tuple[List[ImageGray], List[str]]:
    order = make_generator(seed).permutation(len(images))
    return [images[i] for i in order], [names[i] for i in order]


def _take(
    images: List[ImageGray], names: List[str], start: int, count: int, what: str
) -> Tuple[List[ImageGray], List[str]]:
    if start + count > len(images):
        raise EmptyDatasetError(
            f"Not enough images for the {what}: {count} needed, {len(images) - start}"
            " available."
        )
    return images[start : start + count], names[start : start + count]


def _load_sources(
    cfg: ExperimentConfig,
) -> Tuple[Tuple[List[ImageGray], List[str]], Tuple[List[ImageGray], List[str]]]:
    """Training covers and test pool covers, never sharing an image."""
    presets = load_presets()
    n_test = cfg.pool_covers + cfg.pool_stego
    sides = {}
    for side, source, count in (
        ("train", cfg.train_source, cfg.n_train_covers),
        ("test", cfg.test_source, n_test),
    ):
        if source in presets:
            corpus_seed = derive_seed(cfg.master_seed, "corpus", side)
            images = generate_corpus(
                presets[source], count, cfg.width, cfg.height, corpus_seed
            )
            names = [f"{side}_{i:06d}" for i in range(count)]
            sides[side] = (images, names)
    if len(sides) == 2:
        return sides["train"], sides["test"]

    if (
        "train" not in sides
        and "test" not in sides
        and Path(cfg.train_source).resolve() == Path(cfg.test_source).resolve()
    ):
        images, names = _shuffled(
            *read_directory(cfg.train_source), derive_seed(cfg.master_seed, "split")
        )
        train = _take(images, names, 0, cfg.n_train_covers, "training set")
        test = _take(images, names, cfg.n_train_covers, n_test, "test set")
        return train, test

    for side, source, count in (
        ("train", cfg.train_source, cfg.n_train_covers),
        ("test", cfg.test_source, n_test),
    ):
        if side not in sides:
            images, names = _shuffled(
                *read_directory(source), derive_seed(cfg.master_seed, "split", side)
            )
            sides[side] = _take(images, names, 0, count, f"{side} set")
    return sides["train"], sides["test"]


@dataclass
class ExperimentResult:
    reports: List[DetectionReport]
    verdicts: List[ImageVerdict]
    labels: List[str]
    models: DetectorModels


def report_prefixes(cfg: ExperimentConfig) -> List[List[str]]:
    """Descriptive `N,ALGO,DBs,C/S,CLF` cells of every report row of an experiment."""
    return [
        [
            cfg.name,
            cfg.test_embed.algorithm,
            f"{cfg.train_source}/{cfg.test_source}",
            f"{n_cover}/{n_stego}",
            CLASSIFIER_NAME,
        ]
        for n_cover, n_stego in cfg.ratios
    ]


def _subset_indices(cfg: ExperimentConfig, n_cover: int, n_stego: int) -> List[int]:
    return list(range(n_cover)) + list(
        range(cfg.pool_covers, cfg.pool_covers + n_stego)
    )


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run the full pipeline and write its outputs into `cfg.output_dir`.

    Training covers become a balanced training pair embedded with `train_embed`, on
    which `f_A` and `f_B` are trained. The test pool holds distinct cover images and
    stego images embedded with `test_embed`. Its `B` set is built with `train_embed`,
    the embedding the detectors assume. Every `(covers, stego)` ratio is evaluated on
    the first covers and first stego images of the analysed pool.

    Outputs: `report.csv` (one row per ratio), `verdicts.csv` (whole pool), `models/`
    and the effective `config.yaml`.

    Raises:
        [`~utils.OutputDirLockedError`]: the output directory is used by another run.
        [`~utils.EmptyDatasetError`]: a source holds too few images.
    """
    with locked_output_dir(cfg.output_dir) as output_dir:
        if cfg.train_embed != cfg.test_embed:
            logger.warning(
                f"Stego source mismatch: trained for {cfg.train_embed}, tested on"
                f" {cfg.test_embed}. Error prediction is not reliable in this setting."
            )
        (train_covers, train_names), (pool, pool_names) = _load_sources(cfg)

        pair = build_train_pair(
            train_covers, cfg.train_embed, cfg.master_seed, names=train_names
        )
        models = train_detectors(pair, cfg.feature_cfg, cfg.ec_cfg)

        n_cover, n_stego = cfg.pool_covers, cfg.pool_stego
        stego_images = [
            embed(
                img,
                cfg.test_embed,
                derive_seed(cfg.master_seed, "embed", "test-stego", i),
            )
            for i, img in enumerate(
                tqdm(pool[n_cover : n_cover + n_stego], desc="embed test", unit="img")
            )
        ]
        test_images = pool[:n_cover] + stego_images
        labels = [LABEL_COVER] * n_cover + [LABEL_STEGO] * n_stego
        test_pair = build_test_pair(
            test_images, cfg.train_embed, cfg.master_seed, names=pool_names
        )
        verdicts = analyze(models, test_pair, cfg.feature_cfg)

        reports = []
        for ratio_cover, ratio_stego in cfg.ratios:
            if ratio_cover != ratio_stego:
                logger.warning(
                    f"Unbalanced test set {ratio_cover}/{ratio_stego}: the predicted"
                    " error tracks the error on a balanced test set."
                )
            indices = _subset_indices(cfg, ratio_cover, ratio_stego)
            report = summarize(
                [verdicts[i] for i in indices], [labels[i] for i in indices]
            )
            reports.append(report)
            logger.info(
                f"{ratio_cover}/{ratio_stego}: Err={report.err:.4f}"
                f" Err_pred={report.err_pred:.4f} INC={report.inc}"
            )

        write_report_csv(
            output_dir / REPORT_NAME,
            reports,
            EXPERIMENT_PREFIX_HEADER,
            report_prefixes(cfg),
        )
        write_verdicts_csv(output_dir / VERDICTS_NAME, verdicts, labels)
        save_detectors(models, output_dir / MODELS_DIRNAME)
        dump_experiment_config(cfg, output_dir / CONFIG_ECHO_NAME)
        logger.info(f"Experiment written to '{output_dir}'.")
    return ExperimentResult(reports, verdicts, labels, models)


@validate_stegcheck_args
def synth_to_directory(
    preset: str,
    count: int,
    width: int,
    height: int,
    seed: int,
    out_dir: Union[str, Path],
) -> List[Path]:
    """Write `count` covers of a preset source as `cover_000001.pgm`, ... and a
    `manifest.csv` listing each file's seed."""
    presets = load_presets()
    if preset not in presets:
        raise ConfigError(
            f"Unknown source preset '{preset}'. Available:"
            f" {', '.join(sorted(presets))}."
        )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images = generate_corpus(presets[preset], count, width, height, seed)
    paths = []
    with open(out_dir / MANIFEST_NAME, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["file", "seed", "source"])
        for i, img in enumerate(images):
            path = out_dir / COVER_FILENAME_TEMPLATE.format(i + 1)
            write_pgm(path, img)
            writer.writerow([path.name, split_seed(seed, i), preset])
            paths.append(path)
    logger.info(f"{count} covers written to '{out_dir}'.")
    return paths


@validate_stegcheck_args
def embed_directory(
    in_dir: Union[str, Path],
    algorithm: str,
    rate: float,
    seed: int,
    out_dir: Union[str, Path],
) -> List[Path]:
    """Embed every image of `in_dir` into a file of the same name in `out_dir`.

    Image `name` is embedded with `derive_seed(seed, "embed", name)`. A rate of 0
    copies the files unchanged.
    """
    cfg = EmbedConfig(algorithm, rate)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for path in tqdm(list_images(in_dir), desc="embed", unit="img"):
        target = out_dir / path.name
        if cfg.rate == 0:
            shutil.copyfile(path, target)
        else:
            image_seed = derive_seed(seed, "embed", path.name)
            write_pgm(target, embed(read_pgm(path), cfg, image_seed))
        paths.append(target)
    return paths


def changestats_directories(
    dir_a: Union[str, Path], dir_b: Union[str, Path], out_path: Union[str, Path]
) -> Tuple[List[Tuple[str, ChangeStats]], ChangeStats]:
    """Per-image and total [`~embedding.ChangeStats`] between two directories.

    Writes `name,n_pm1,n_pm2,n_other,n_total` rows followed by a `TOTAL` row.

    Raises:
        [`~utils.UnmatchedFilesError`]: the directories hold different file names.
    """
    paths_a = {path.name: path for path in list_images(dir_a)}
    paths_b = {path.name: path for path in list_images(dir_b)}
    if paths_a.keys() != paths_b.keys():
        unmatched = sorted(paths_a.keys() ^ paths_b.keys())
        raise UnmatchedFilesError(
            f"Directories hold different files: {', '.join(unmatched[:5])}"
            + (" ..." if len(unmatched) > 5 else "")
        )
    rows = []
    total = ChangeStats.zero()
    for name in tqdm(sorted(paths_a), desc="changestats", unit="img"):
        stats = count_changes(read_pgm(paths_a[name]), read_pgm(paths_b[name]))
        rows.append((name, stats))
        total = total + stats
    with open(out_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["name", "n_pm1", "n_pm2", "n_other", "n_total"])
        for name, stats in rows + [("TOTAL", total)]:
            writer.writerow(
                [name, stats.n_pm1, stats.n_pm2, stats.n_other, stats.n_total]
            )
    return rows, total


def features_directory(
    in_dir: Union[str, Path],
    feature_cfg: FeatureConfig,
    out_path: Union[str, Path],
    label: Optional[str] = None,
) -> None:
    """Extract the features of every image of `in_dir` into a feature CSV."""
    images, _ = read_directory(in_dir)
    if not images:
        raise EmptyDatasetError(f"No PGM image in '{in_dir}'.")
    matrix = extract_features_batch(images, feature_cfg)
    labels = [label] * len(images) if label is not None else None
    write_feature_csv(out_path, matrix, labels)


@validate_stegcheck_args
def train_from_directory(
    covers_dir: Union[str, Path],
    embed_cfg: EmbedConfig,
    seed: int,
    out_dir: Union[str, Path],
    feature_cfg: FeatureConfig,
    ec_cfg: EcConfig,
) -> DetectorModels:
    """Build the training pair from a cover directory, train and save the detectors."""
    covers, names = read_directory(covers_dir)
    pair = build_train_pair(covers, embed_cfg, seed, names=names)
    ec_cfg = replace(ec_cfg, seed=derive_seed(seed, "ensemble"))
    models = train_detectors(pair, feature_cfg, ec_cfg)
    with locked_output_dir(out_dir) as directory:
        save_detectors(models, directory)
    return models


@validate_stegcheck_args
def detect_directory(
    models_dir: Union[str, Path],
    images_dir: Union[str, Path],
    seed: int,
    out_dir: Union[str, Path],
    embed_cfg: Optional[EmbedConfig] = None,
) -> DetectionReport:
    """Label-free detection on a directory of images.

    The `B` set is built with the embedding the detectors were trained for, unless
    `embed_cfg` overrides it. Writes `report.csv` (label-dependent cells empty) and
    `verdicts.csv` into `out_dir`.
    """
    models = load_detectors(models_dir)
    if embed_cfg is None:
        embed_cfg = models.embed_cfg
    elif embed_cfg != models.embed_cfg:
        logger.warning(
            f"Stego source mismatch: detectors trained for {models.embed_cfg}, B set"
            f" built with {embed_cfg}. Error prediction is not reliable in this"
            " setting."
        )
    images, names = read_directory(images_dir)
    pair = build_test_pair(images, embed_cfg, seed, names=names)
    verdicts = analyze(models, pair, models.feature_cfg)
    report = summarize(verdicts)
    with locked_output_dir(out_dir) as directory:
        write_report_csv(directory / REPORT_NAME, [report])
        write_verdicts_csv(directory / VERDICTS_NAME, verdicts)
    return report


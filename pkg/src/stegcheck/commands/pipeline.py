# coding=utf-8
# Copyright 2022-present, the stegcheck authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Contains commands to extract features, train detectors and run detection."""
from argparse import ArgumentParser

from ..constants import ALGORITHMS, EXPERIMENT_PREFIX_HEADER, LABELS, REPORT_NAME
from ..embedding import EmbedConfig
from ..harness import (
    detect_directory,
    features_directory,
    load_experiment_config,
    report_prefixes,
    run_experiment,
    train_from_directory,
)
from . import BaseStegcheckCLICommand
from ._cli_utils import ANSI, report_table


def _add_config_argument(parser: ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=str,
        default=None,
        help=(
            "Experiment file (YAML). Its `features` and `ensemble` sections are used;"
            " missing keys take their default value."
        ),
    )


class PipelineCommands(BaseStegcheckCLICommand):
    @staticmethod
    def register_subcommand(parser: ArgumentParser):
        features_parser = parser.add_parser(
            "features", help="Extract co-occurrence features into a CSV file."
        )
        features_parser.add_argument("--in", dest="in_dir", type=str, required=True)
        features_parser.add_argument(
            "--label",
            type=str.upper,
            choices=LABELS,
            default=None,
            help="Label written on every row (cover or stego).",
        )
        features_parser.add_argument("--out", type=str, required=True)
        _add_config_argument(features_parser)
        features_parser.set_defaults(func=lambda args: FeaturesCommand(args))

        train_parser = parser.add_parser(
            "train", help="Train the detector pair on a directory of covers."
        )
        train_parser.add_argument("--covers", type=str, required=True)
        train_parser.add_argument(
            "--algorithm", type=str, choices=ALGORITHMS, required=True
        )
        train_parser.add_argument("--rate", type=float, required=True)
        train_parser.add_argument("--seed", type=int, default=0)
        train_parser.add_argument(
            "--out", type=str, required=True, help="Model directory."
        )
        _add_config_argument(train_parser)
        train_parser.set_defaults(func=lambda args: TrainCommand(args))

        detect_parser = parser.add_parser(
            "detect", help="Label-free inconsistency detection on a directory."
        )
        detect_parser.add_argument("--models", type=str, required=True)
        detect_parser.add_argument("--images", type=str, required=True)
        detect_parser.add_argument("--seed", type=int, default=0)
        detect_parser.add_argument("--out", type=str, required=True)
        detect_parser.add_argument(
            "--algorithm",
            type=str,
            choices=ALGORITHMS,
            default=None,
            help="Override the embedding the detectors were trained for.",
        )
        detect_parser.add_argument("--rate", type=float, default=None)
        detect_parser.set_defaults(func=lambda args: DetectCommand(args))

        experiment_parser = parser.add_parser(
            "experiment", help="Run a full train/test experiment."
        )
        _add_config_argument(experiment_parser)
        experiment_parser.add_argument(
            "--seed", type=int, default=None, help="Override `run.master_seed`."
        )
        experiment_parser.add_argument(
            "--out", type=str, default=None, help="Override `run.output_dir`."
        )
        experiment_parser.set_defaults(func=lambda args: ExperimentCommand(args))


class FeaturesCommand:
    def __init__(self, args):
        self.args = args

    def run(self):
        cfg = load_experiment_config(self.args.config)
        features_directory(
            self.args.in_dir, cfg.feature_cfg, self.args.out, label=self.args.label
        )
        print(
            f"{cfg.feature_cfg.dimension}-dimensional features written to"
            f" {ANSI.bold(self.args.out)}."
        )


class TrainCommand:
    def __init__(self, args):
        self.args = args

    def run(self):
        cfg = load_experiment_config(self.args.config)
        models = train_from_directory(
            covers_dir=self.args.covers,
            embed_cfg=EmbedConfig(self.args.algorithm, self.args.rate),
            seed=self.args.seed,
            out_dir=self.args.out,
            feature_cfg=cfg.feature_cfg,
            ec_cfg=cfg.ec_cfg,
        )
        print(
            f"Detectors ({models.f_a.n_learners} learners, d_sub="
            f"{models.f_a.subspace_dim}) saved to {ANSI.bold(self.args.out)}."
        )


class DetectCommand:
    def __init__(self, args):
        self.args = args

    def run(self):
        embed_cfg = None
        if self.args.algorithm is not None or self.args.rate is not None:
            if self.args.algorithm is None or self.args.rate is None:
                raise ValueError("--algorithm and --rate must be given together.")
            embed_cfg = EmbedConfig(self.args.algorithm, self.args.rate)
        report = detect_directory(
            models_dir=self.args.models,
            images_dir=self.args.images,
            seed=self.args.seed,
            out_dir=self.args.out,
            embed_cfg=embed_cfg,
        )
        print(report_table([report]))
        if report.note is not None:
            print(ANSI.gray(report.note))
        print(ANSI.gray(f"Report written to {self.args.out}/{REPORT_NAME}."))


class ExperimentCommand:
    def __init__(self, args):
        self.args = args

    def run(self):
        cfg = load_experiment_config(self.args.config).with_overrides(
            master_seed=self.args.seed, output_dir=self.args.out
        )
        result = run_experiment(cfg)
        print(
            report_table(
                result.reports, EXPERIMENT_PREFIX_HEADER, report_prefixes(cfg)
            )
        )
        print(ANSI.gray(f"Outputs written to {cfg.output_dir}."))

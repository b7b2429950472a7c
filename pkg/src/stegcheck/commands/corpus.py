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
"""Contains commands to generate, embed and compare image corpora."""
from argparse import ArgumentParser

from ..constants import ALGORITHMS, CHANGESTATS_NAME
from ..harness import changestats_directories, embed_directory, synth_to_directory
from . import BaseStegcheckCLICommand
from ._cli_utils import ANSI, tabulate


class CorpusCommands(BaseStegcheckCLICommand):
    @staticmethod
    def register_subcommand(parser: ArgumentParser):
        synth_parser = parser.add_parser(
            "synth", help="Generate a corpus of synthetic covers."
        )
        synth_parser.add_argument(
            "--preset",
            type=str,
            required=True,
            help="Source preset, e.g. `source-A` or `source-B`.",
        )
        synth_parser.add_argument(
            "--count", type=int, required=True, help="Number of covers."
        )
        synth_parser.add_argument("--width", type=int, default=128)
        synth_parser.add_argument("--height", type=int, default=128)
        synth_parser.add_argument("--seed", type=int, default=0)
        synth_parser.add_argument(
            "--out", type=str, required=True, help="Output directory."
        )
        synth_parser.set_defaults(func=lambda args: SynthCommand(args))

        embed_parser = parser.add_parser(
            "embed", help="Embed every image of a directory."
        )
        embed_parser.add_argument("--in", dest="in_dir", type=str, required=True)
        embed_parser.add_argument(
            "--algorithm", type=str, choices=ALGORITHMS, required=True
        )
        embed_parser.add_argument(
            "--rate", type=float, required=True, help="Payload in bits per pixel."
        )
        embed_parser.add_argument("--seed", type=int, default=0)
        embed_parser.add_argument("--out", type=str, required=True)
        embed_parser.set_defaults(func=lambda args: EmbedCommand(args))

        changestats_parser = parser.add_parser(
            "changestats",
            help="Count pixels changed by +-1, +-2 and more between two directories.",
        )
        changestats_parser.add_argument("dir_a", type=str)
        changestats_parser.add_argument("dir_b", type=str)
        changestats_parser.add_argument(
            "--out",
            type=str,
            default=CHANGESTATS_NAME,
            help=f"Output CSV file. Defaults to `{CHANGESTATS_NAME}`.",
        )
        changestats_parser.set_defaults(func=lambda args: ChangeStatsCommand(args))


class SynthCommand:
    def __init__(self, args):
        self.args = args

    def run(self):
        paths = synth_to_directory(
            preset=self.args.preset,
            count=self.args.count,
            width=self.args.width,
            height=self.args.height,
            seed=self.args.seed,
            out_dir=self.args.out,
        )
        print(f"{len(paths)} covers written to {ANSI.bold(self.args.out)}.")


class EmbedCommand:
    def __init__(self, args):
        self.args = args

    def run(self):
        paths = embed_directory(
            in_dir=self.args.in_dir,
            algorithm=self.args.algorithm,
            rate=self.args.rate,
            seed=self.args.seed,
            out_dir=self.args.out,
        )
        print(
            f"{len(paths)} images embedded with {self.args.algorithm} at"
            f" {self.args.rate} bpp into {ANSI.bold(self.args.out)}."
        )


class ChangeStatsCommand:
    def __init__(self, args):
        self.args = args

    def run(self):
        _, total = changestats_directories(
            self.args.dir_a, self.args.dir_b, self.args.out
        )
        print(
            tabulate(
                rows=[
                    ["TOTAL", total.n_pm1, total.n_pm2, total.n_other, total.n_total]
                ],
                headers=["", "+-1", "+-2", "OTHER", "PIXELS"],
            )
        )
        print(ANSI.gray(f"Per-image counts written to {self.args.out}."))

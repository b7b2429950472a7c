#!/usr/bin/env python
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

import sys
from argparse import ArgumentParser
from typing import List, Optional

from stegcheck.commands.corpus import CorpusCommands
from stegcheck.commands.pipeline import PipelineCommands
from stegcheck.utils import StegcheckError, logging


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        "stegcheck-cli", usage="stegcheck-cli [-v] <command> [<args>]"
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress messages, -vv for numerical details",
    )
    commands_parser = parser.add_subparsers(help="stegcheck-cli command helpers")

    # Register commands
    CorpusCommands.register_subcommand(commands_parser)
    PipelineCommands.register_subcommand(commands_parser)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not hasattr(args, "func"):
        parser.print_help()
        sys.exit(1)

    if args.verbose >= 2:
        logging.set_verbosity_debug()
    elif args.verbose == 1:
        logging.set_verbosity_info()

    # Run
    try:
        service = args.func(args)
        service.run()
    except (StegcheckError, ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        sys.exit(1)
    return 0


if __name__ == "__main__":
    main()

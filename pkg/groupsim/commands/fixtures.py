from __future__ import annotations

import argparse
from pathlib import Path

from ..fixtures import Archetype, make_fixture
from ..reporting import write_event
from .common import add_common_arguments


def register(subparsers: argparse._SubParsersAction) -> None:
    fixtures = subparsers.add_parser(
        "fixtures",
        help="Write synthetic benchmark events for the chosen archetypes",
    )
    fixtures.add_argument(
        "--archetype",
        action="append",
        choices=[a.value for a in Archetype],
        default=None,
        help="Archetype to emit (repeatable; default: all)",
    )
    fixtures.add_argument(
        "--count", type=int, default=1, help="Events per archetype (default: 1)"
    )
    fixtures.add_argument(
        "--scale", type=int, default=10, help="Peak views in thousands (default: 10)"
    )
    fixtures.add_argument("--seed", type=int, default=0, help="First noise seed (default: 0)")
    fixtures.add_argument(
        "--output-dir",
        dest="output_dir",
        type=Path,
        default=Path("fixtures/events"),
        help="Directory the event files are written to",
    )
    add_common_arguments(fixtures)

    def handle_fixtures(
        args: argparse.Namespace, parser: argparse.ArgumentParser = fixtures
    ) -> int:
        if args.count < 1:
            parser.error("--count must be at least 1")
        kinds = [Archetype(a) for a in args.archetype] if args.archetype else list(Archetype)
        written = []
        for kind in kinds:
            for seed in range(args.seed, args.seed + args.count):
                event = make_fixture(kind, args.scale, seed)
                written.append(write_event(event, args.output_dir))
        for path in written:
            print(f"- {path}")
        print(f"Wrote {len(written)} events to {args.output_dir}")
        return 0

    fixtures.set_defaults(func=handle_fixtures)

from __future__ import annotations

import argparse
import json
from pathlib import Path

from ..core.models import Domain
from ..core.validation import validate_country_code, validate_layer, validate_output_dir
from ..hierarchy import ensure_tree, instantiate_agents, retrieve_layer
from ..oracle import OracleGateway
from ..reporting import write_json
from .common import add_common_arguments, config_from_args, load_graph


def register(subparsers: argparse._SubParsersAction) -> None:
    gen = subparsers.add_parser(
        "generate-agents",
        help="Instantiate the group agents of one tree layer",
    )
    gen.add_argument("country", help="Two-letter country code (e.g., CN)")
    gen.add_argument("domain", choices=[d.value for d in Domain], help="Event domain")
    gen.add_argument("--layer", type=int, default=1, help="Tree layer (default: 1)")
    gen.add_argument(
        "--oracle",
        dest="oracle_mode",
        choices=["stub", "remote"],
        default=None,
        help="Oracle backend used on a graph miss (default: stub)",
    )
    gen.add_argument(
        "--save-graph",
        dest="save_graph",
        type=Path,
        default=None,
        help="Write the (possibly extended) knowledge graph to this directory",
    )
    gen.add_argument(
        "--output",
        type=Path,
        default=None,
        help="Write the agent list here instead of stdout",
    )
    add_common_arguments(gen)

    def handle_generate_agents(
        args: argparse.Namespace, parser: argparse.ArgumentParser = gen
    ) -> int:
        cfg = config_from_args(args)
        country = validate_country_code(args.country)
        domain = Domain(args.domain)
        layer = validate_layer(args.layer)

        graph = load_graph(args.graph_dir)
        gateway = OracleGateway.from_config(cfg)
        ensure_tree(graph, country, domain, gateway)
        specs = retrieve_layer(graph, country, domain, layer)
        agents = instantiate_agents(
            specs, country, gateway, memory_capacity=cfg["fading"].memory_capacity
        )

        if args.save_graph:
            graph.save(args.save_graph)

        payload = {
            "country": country,
            "domain": domain.value,
            "layer": layer,
            "count": len(agents),
            "agents": [a.to_dict() for a in agents],
        }
        if args.output:
            write_json(validate_output_dir(args.output.parent) / args.output.name, payload)
            print(f"Wrote {len(agents)} agents to {args.output}")
        else:
            print(json.dumps(payload, indent=2, sort_keys=True))
        return 0

    gen.set_defaults(func=handle_generate_agents)

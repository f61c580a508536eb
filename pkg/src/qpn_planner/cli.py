"""
Command-line surface: `qpn <command> FILE [options]`.

Reports go to stdout and logs to stderr. Exit codes: 0 success, 1 invalid
model, 2 a sampled model contradicts a symbolic claim, 3 usage error.
"""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional

from qpn_planner.dominance import admissible_set
from qpn_planner.errors import InvalidNetworkError, OracleContradiction, QPNError
from qpn_planner.generate import random_network
from qpn_planner.model_file import TEST_TREAT, parse, serialize, to_dot
from qpn_planner.network import Network, validate
from qpn_planner.oracle import Oracle, verify_reduction_signs
from qpn_planner.ordering import induced_probability_order, induced_utility_order
from qpn_planner.ordering import to_dot as order_to_dot
from qpn_planner.reduction import reduce
from qpn_planner.reporting import (
    admissibility_report,
    eu_gap_frame,
    order_report,
    plot_eu_gaps,
    reduction_report,
    sign_report,
    strategies_report,
    validation_report,
)
from qpn_planner.settings import Settings, get_settings
from qpn_planner.strategy import Strategy, enumerate_strategies

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CONTRADICTION = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read '{path}': {e.strerror}") from None


def _load(path: str) -> Network:
    net = parse(_read(path))
    violations = validate(net)
    if violations:
        raise InvalidNetworkError(violations)
    return net


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"Wrote '{path}'")


def _with_sampler(settings: Settings, args: argparse.Namespace) -> Settings:
    update = {}
    if args.samples is not None:
        update["samples"] = args.samples
    if args.seed is not None:
        update["seed"] = args.seed
    if not update:
        return settings
    sampler = settings.sampler.model_validate({**settings.sampler.model_dump(), **update})
    return settings.model_copy(update={"sampler": sampler})


def cmd_validate(args: argparse.Namespace, settings: Settings) -> int:
    net = parse(_read(args.file))
    violations = validate(net)
    sys.stdout.write(validation_report(violations))
    return EXIT_INVALID if violations else EXIT_OK


def cmd_reduce(args: argparse.Namespace, settings: Settings) -> int:
    net = _load(args.file)
    orient = settings.reduction.orient_signals and not args.no_orient
    reduced, steps = reduce(net, orient_signals=orient)
    sys.stdout.write(reduction_report(net, reduced, steps))
    if args.dot:
        _write(args.dot, to_dot(reduced, "reduced"))
    return EXIT_OK


def cmd_order(args: argparse.Namespace, settings: Settings) -> int:
    net = _load(args.file)
    limit = settings.reduction.max_order_variables
    if args.node is None or args.node == net.value_node:
        po = induced_utility_order(net, limit)
        title = f"UTILITY ORDER ({net.value_node})"
    else:
        if not net.has(args.node):
            raise UsageError(f"unknown variable '{args.node}'")
        po = induced_probability_order(net, args.node, limit)
        title = f"PROBABILITY ORDER ({args.node})"
    sys.stdout.write(order_report(po, net, title))
    if args.dot:
        _write(args.dot, order_to_dot(po, net))
    return EXIT_OK


def cmd_strategies(args: argparse.Namespace, settings: Settings) -> int:
    net = _load(args.file)
    analysis, _ = reduce(net, orient_signals=False)
    if analysis.decisions:
        strategies = enumerate_strategies(
            analysis, restrict_fixed_observations=not args.all_observations
        )
    else:
        strategies = [Strategy(())]
    sys.stdout.write(strategies_report(analysis, strategies, args.cases))
    return EXIT_OK


def cmd_admissible(args: argparse.Namespace, settings: Settings) -> int:
    net = _load(args.file)
    settings = _with_sampler(settings, args)
    techniques = settings.admissibility.model_dump()
    if args.pairwise_only:
        techniques.update(pairwise=True, kway=False, mixed=False, prune=False)
    elif args.kway:
        techniques.update(pairwise=True, kway=True, mixed=False)
    elif args.mixed:
        techniques.update(pairwise=True, kway=True, mixed=True)
    if args.no_prune:
        techniques["prune"] = False
    settings = settings.model_copy(
        update={"admissibility": settings.admissibility.model_validate(techniques)}
    )
    result = admissible_set(net, settings)
    sys.stdout.write(admissibility_report(net, result))
    if args.plot:
        oracle = Oracle(
            net,
            settings.sampler,
            result.forced,
            settings.oracle.max_chance_variables,
            settings.reduction.max_order_variables,
        )
        plot_eu_gaps(eu_gap_frame(oracle, result.proofs), args.plot)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    net = _load(args.file)
    settings = _with_sampler(settings, args)
    reduced, steps = reduce(net, orient_signals=settings.reduction.orient_signals)
    report = verify_reduction_signs(
        net,
        reduced,
        steps,
        settings.sampler,
        settings.reduction.max_order_variables,
        settings.admissibility.tolerance,
    )
    sys.stdout.write(sign_report(reduced, report))
    return EXIT_CONTRADICTION if report.violations else EXIT_OK


def cmd_example(args: argparse.Namespace, settings: Settings) -> int:
    if args.name == "test-treat":
        sys.stdout.write(TEST_TREAT)
    else:
        seed = args.seed if args.seed is not None else settings.sampler.seed
        sys.stdout.write(serialize(random_network(seed)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qpn", description="Qualitative probabilistic network planner.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="Check a model file for structural errors.")
    p.add_argument("file")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("reduce", help="Remove nodes and reverse arcs qualitatively.")
    p.add_argument("file")
    p.add_argument("--dot", metavar="OUT", help="Write the reduced network as DOT.")
    p.add_argument("--no-orient", action="store_true", help="Keep signals in causal order.")
    p.set_defaults(handler=cmd_reduce)

    p = sub.add_parser("order", help="Print an induced partial order.")
    p.add_argument("file")
    p.add_argument("--node", help="Chance node; the value node by default.")
    p.add_argument("--dot", metavar="OUT", help="Write the order as DOT.")
    p.set_defaults(handler=cmd_order)

    p = sub.add_parser("strategies", help="Enumerate strategies of the reduced network.")
    p.add_argument("file")
    p.add_argument("--cases", action="store_true", help="Print each case analysis.")
    p.add_argument(
        "--all-observations",
        action="store_true",
        help="Let policies range over observed decisions with fixed policies too.",
    )
    p.set_defaults(handler=cmd_strategies)

    p = sub.add_parser("admissible", help="Prove strategies dominated.")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--pairwise-only", action="store_true")
    group.add_argument("--kway", action="store_true", help="Pairwise and k-way dominance.")
    group.add_argument("--mixed", action="store_true", help="Every dominance technique.")
    p.add_argument("--no-prune", action="store_true", help="Skip hypothetical pruning.")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--plot", metavar="OUT", help="Save a histogram of proof EU margins.")
    p.set_defaults(handler=cmd_admissible)

    p = sub.add_parser("verify", help="Check reduced signs against sampled models.")
    p.add_argument("file")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("example", help="Print a built-in or random model file.")
    p.add_argument("name", choices=["test-treat", "random"])
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_example)
    return parser


def run(argv: Optional[List[str]] = None, settings: Optional[Settings] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    settings = settings or get_settings()
    try:
        return args.handler(args, settings)
    except UsageError as e:
        sys.stderr.write(f"qpn: error: {e}\n")
        return EXIT_USAGE
    except OracleContradiction as e:
        sys.stderr.write(f"qpn: {e}\n")
        for line in e.proof.evidence:
            sys.stderr.write(f"  {line}\n")
        return EXIT_CONTRADICTION
    except QPNError as e:
        sys.stderr.write(f"qpn: {e}\n")
        return EXIT_INVALID


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.logging.log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    return run(argv, settings)


if __name__ == "__main__":
    sys.exit(main())

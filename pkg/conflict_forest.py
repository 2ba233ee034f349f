#!/usr/bin/env python3
"""
Command line front door: generate instances, schedule them, verify reports and
compare against the exhaustive oracles.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 cap exceeded.
"""

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple

from tqdm import tqdm

from conflict_graph import measure_rho
from errors import CapExceededError, ConflictForestError, InstanceFormatError, SchedulerInvariantError
from grid_scheduler import mst_length_class_schedule
from instance_generators import (gen_grid_graph, gen_random_missing_links, gen_random_weighted_instance,
                                 gen_wheel, wheel_steiner_terminals)
from instance_io import (ConflictParams, ConflictSpec, OracleReport, PowerRecord, Problem, ScheduleReport,
                         WeightRecord, build_problem, dumps_canonical, instance_from_graph, load_instance,
                         load_report, report_from_schedule, schedule_from_report, write_model)
from logging_config import get_logger, set_level
from oracle import max_feasible_forest, opt_steiner_tree, opt_tree_schedule
from schedule import Schedule
from schedule_checker import check_schedule
from scheduler import cap_kruskal, conn, mst_greedy
from settings import get_settings
from sinr_model import PowerScheme, SinrParams
from steiner import SteinerInstance, greedy_mmst, steiner_schedule

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_CAP = 3

ALGORITHMS = ["conn", "mst-greedy", "steiner", "steiner-length-class", "mst-length-class"]


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(text)
        logger.info(f"Wrote {path}")
    else:
        sys.stdout.write(text)


def _conflict_spec(args) -> ConflictSpec:
    if args.model in ("l2", "line"):
        return ConflictSpec(model=args.model)
    if args.model == "sinr":
        power = PowerRecord(kind="length-exponent", tau=args.tau) if args.tau else PowerRecord()
        params = ConflictParams(alpha=args.alpha, beta=args.beta, noise=args.noise, power=power,
                                missing_links=True if args.missing_links else None)
        return ConflictSpec(model="sinr", params=params)
    if args.model == "disk":
        return ConflictSpec(model="disk", params=ConflictParams(K=args.K))
    if args.model == "protocol":
        return ConflictSpec(model="protocol", params=ConflictParams(K1=args.K1, K2=args.K2))
    raise InstanceFormatError(f"model {args.model!r} cannot be generated for this kind")


def cmd_gen(args) -> int:
    """Generate an instance file."""
    terminals = None
    if args.kind == "wheel":
        wheel = gen_wheel(args.k, attach_at_zero=args.attach_zero, bounded_degree=args.bounded_degree)
        graph, positions = wheel.graph, list(wheel.positions)
        if args.steiner:
            terminals = wheel_steiner_terminals(wheel)
        spec = _conflict_spec(args)
    elif args.kind == "random":
        if args.seed is None:
            raise InstanceFormatError("random generation needs --seed")
        if args.model == "explicit":
            graph, conflict = gen_random_weighted_instance(args.seed, args.n, args.links or args.n + 2,
                                                           density=args.density)
            weights = [WeightRecord(e=e, f=f, w=w) for (e, f), w in sorted(conflict.weights().items())]
            spec = ConflictSpec(model="explicit", weights=weights)
            positions = None
        else:
            graph = gen_random_missing_links(args.n, args.area, args.pi, args.p, args.seed)
            positions = _random_positions(graph)
            spec = _conflict_spec(args)
    else:
        graph = gen_grid_graph(args.rows, args.cols, args.spacing)
        positions = [(c * args.spacing, r * args.spacing) for r in range(args.rows) for c in range(args.cols)]
        spec = _conflict_spec(args)

    instance = instance_from_graph(graph, spec, positions=positions, terminals=terminals)
    _emit(dumps_canonical(instance), args.out)
    return EXIT_OK


def _random_positions(graph) -> List[Tuple[float, float]]:
    positions: List[Optional[Tuple[float, float]]] = [None] * graph.node_count
    for link in graph.links:
        positions[link.u] = link.sender
        positions[link.v] = link.receiver
    return [p if p is not None else (0.0, 0.0) for p in positions]


def run_algorithm(problem: Problem, algo: str, dual: bool = False) -> Schedule:
    if dual and algo != "conn":
        raise InstanceFormatError(f"--dual only applies to --algo conn, not {algo}")
    if algo == "conn":
        return conn(problem.graph, problem.conflict, dual=dual)
    if algo == "mst-greedy":
        return mst_greedy(problem.graph, problem.conflict)
    if algo in ("steiner", "steiner-length-class"):
        if not problem.terminals:
            raise InstanceFormatError("the steiner algorithm needs terminals in the instance")
        inst = SteinerInstance(problem.graph, problem.terminals, problem.conflict)
        return steiner_schedule(inst, by_length_class=algo == "steiner-length-class")
    if algo == "mst-length-class":
        params = problem.params or SinrParams()
        power = problem.power or PowerScheme.uniform()
        return mst_length_class_schedule(problem.graph, problem.conflict, params, power)
    raise InstanceFormatError(f"unknown algorithm {algo!r}")


def schedule_instance(path: str, algo: str, dual: bool = False, with_rho: bool = False,
                      timing: bool = False) -> ScheduleReport:
    """Load, schedule and verify one instance file."""
    instance = load_instance(path)
    problem = build_problem(instance)
    started = time.perf_counter()
    schedule = run_algorithm(problem, algo, dual)
    runtime_ms = (time.perf_counter() - started) * 1000 if timing else None
    terminals = problem.terminals if algo.startswith("steiner") else None
    check = check_schedule(schedule, problem.graph, problem.conflict, terminals=terminals)
    rho = measure_rho(problem.conflict) if with_rho else None
    logger.info(f"{path}: {algo} used {schedule.slot_count} slots, verified={check.ok}")
    return report_from_schedule(schedule, check, rho=rho, runtime_ms=runtime_ms)


def _report_target(path: str, args, many: bool) -> Optional[str]:
    if args.out_dir:
        return str(Path(args.out_dir) / f"{Path(path).stem}.{args.algo}.json")
    if many:
        raise InstanceFormatError("several instances need --out-dir")
    return args.out


def cmd_schedule(args) -> int:
    """Schedule one or more instance files; exit 1 if any report fails verification."""
    many = len(args.instances) > 1
    targets = [_report_target(path, args, many) for path in args.instances]

    def job(path: str) -> ScheduleReport:
        return schedule_instance(path, args.algo, args.dual, args.rho, args.timing)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as executor:
        reports = list(tqdm(executor.map(job, args.instances), total=len(args.instances),
                            desc="Scheduling", disable=not many, file=sys.stderr))

    status = EXIT_OK
    for path, target, report in zip(args.instances, targets, reports):
        _emit(dumps_canonical(report), target)
        v = report.verification
        if not (v.feasible and v.spanning and v.partition):
            print(f"Verification failed for {path}: {v.first_violation}", file=sys.stderr)
            status = EXIT_VERIFY
    return status


def cmd_verify(args) -> int:
    """Re-check a report against the conflict graph derived from its instance."""
    problem = build_problem(load_instance(args.instance))
    report = load_report(args.report)
    schedule = schedule_from_report(report)
    terminals = problem.terminals if report.algorithm.startswith("steiner") else None
    check = check_schedule(schedule, problem.graph, problem.conflict, terminals=terminals)
    if check.ok:
        print(f"OK: {schedule.slot_count} slots verified")
        return EXIT_OK
    for violation in check.violations:
        print(f"Verification failed: {violation}")
    return EXIT_VERIFY


def cmd_oracle(args) -> int:
    """Exhaustive optimum for a desk-scale instance, with the ratio of a heuristic run."""
    problem = build_problem(load_instance(args.instance))
    prior = load_report(args.prior) if args.prior else None

    if args.mode == "forest":
        if prior is not None:
            logger.warning("--prior is ignored in forest mode; the baseline is cap_kruskal")
        forest = max_feasible_forest(problem.graph, problem.conflict)
        baseline, source = len(cap_kruskal(problem.graph, problem.conflict)), "cap_kruskal"
        optimum, witness = len(forest), [sorted(forest)]
        ratio = optimum / baseline if baseline else None
    elif args.mode == "schedule":
        best = opt_tree_schedule(problem.graph, problem.conflict)
        if prior is not None:
            baseline, source = prior.stats.slot_count, prior.algorithm
        else:
            baseline, source = conn(problem.graph, problem.conflict).slot_count, "conn"
        optimum, witness = best.chi, [sorted(slot) for slot in best.slots]
        ratio = baseline / optimum if optimum else None
    else:
        if not problem.terminals:
            raise InstanceFormatError("steiner oracle needs terminals in the instance")
        inst = SteinerInstance(problem.graph, problem.terminals, problem.conflict)
        best = opt_steiner_tree(inst)
        if prior is not None and prior.stats.load is not None:
            baseline, source = prior.stats.load, prior.algorithm
        else:
            baseline, source = greedy_mmst(inst).z, "greedy_mmst"
        optimum, witness = best.z, [sorted(best.tree)]
        ratio = baseline / optimum if optimum else (1.0 if baseline == 0 else None)

    report = OracleReport(mode=args.mode, optimum=optimum, witness=witness, baseline=baseline,
                          baseline_source=str(source), ratio=ratio)
    _emit(dumps_canonical(report), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conflict_forest.py",
        description="Spanning and Steiner trees with conflict-free slot schedules",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python3 conflict_forest.py gen wheel --k 3 --out wheel3.json
  python3 conflict_forest.py gen random --n 8 --p 1.0 --seed 7 --out r8.json
  python3 conflict_forest.py schedule wheel3.json --algo mst-greedy --out wheel3.mst.json
  python3 conflict_forest.py schedule runs/*.json --algo conn --out-dir reports --jobs 4
  python3 conflict_forest.py verify wheel3.json wheel3.mst.json
  python3 conflict_forest.py oracle tiny.json --mode schedule --prior tiny.conn.json
        """
    )
    parser.add_argument("--verbose", action="store_true", help="Log progress at INFO level")
    parser.add_argument("--debug", action="store_true", help="Log every algorithm round")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate an instance file")
    gen.add_argument("kind", choices=["wheel", "random", "grid"])
    gen.add_argument("--k", type=int, default=3, help="Wheel spokes (default: 3)")
    gen.add_argument("--attach-zero", action="store_true", help="Attach ordinary wheel links at j=0")
    gen.add_argument("--bounded-degree", action="store_true", help="Replace the wheel hub by a path")
    gen.add_argument("--steiner", action="store_true", help="Add hub and rim terminals to a wheel")
    gen.add_argument("--n", type=int, default=8, help="Random node count (default: 8)")
    gen.add_argument("--links", type=int, help="Link count for --model explicit")
    gen.add_argument("--density", type=float, default=0.3, help="Conflict density for --model explicit")
    gen.add_argument("--area", type=float, default=3.0, help="Side of the random deployment square")
    gen.add_argument("--pi", type=float, default=2.0, help="Longest optional link distance")
    gen.add_argument("--p", type=float, default=0.5, help="Probability an optional pair is available")
    gen.add_argument("--seed", type=int, help="Seed (required for random)")
    gen.add_argument("--rows", type=int, default=3)
    gen.add_argument("--cols", type=int, default=3)
    gen.add_argument("--spacing", type=float, default=1.0)
    gen.add_argument("--model", choices=["l2", "line", "sinr", "disk", "protocol", "explicit"], default="l2",
                     help="Conflict model recorded in the instance (default: l2)")
    gen.add_argument("--alpha", type=float, default=3.0)
    gen.add_argument("--beta", type=float, default=1.0)
    gen.add_argument("--noise", type=float, default=0.0)
    gen.add_argument("--tau", type=float, default=0.0, help="Length-exponent power; 0 means uniform")
    gen.add_argument("--missing-links", action="store_true", help="SINR interference only along available pairs")
    gen.add_argument("--K", type=float, default=1.0)
    gen.add_argument("--K1", type=float, default=1.0)
    gen.add_argument("--K2", type=float, default=1.0)
    gen.add_argument("--out", help="Output file (default: stdout)")
    gen.set_defaults(handler=cmd_gen)

    sched = commands.add_parser("schedule", help="Schedule instance files")
    sched.add_argument("instances", nargs="+")
    sched.add_argument("--algo", choices=ALGORITHMS, default="conn")
    sched.add_argument("--dual", action="store_true", help="Dual-feasible Conn with reversed slot copies")
    sched.add_argument("--out", help="Report file for a single instance (default: stdout)")
    sched.add_argument("--out-dir", help="Directory for reports of several instances")
    sched.add_argument("--jobs", type=int, default=1, help="Instances processed in parallel")
    sched.add_argument("--rho", action="store_true", help="Record the exact inductive independence")
    sched.add_argument("--timing", action="store_true", help="Record runtime_ms (output no longer byte-stable)")
    sched.set_defaults(handler=cmd_schedule)

    verify = commands.add_parser("verify", help="Verify a schedule report")
    verify.add_argument("instance")
    verify.add_argument("report")
    verify.set_defaults(handler=cmd_verify)

    oracle = commands.add_parser("oracle", help="Exhaustive optimum for a small instance")
    oracle.add_argument("instance")
    oracle.add_argument("--mode", choices=["forest", "schedule", "steiner"], default="schedule")
    oracle.add_argument("--prior", help="Report of an earlier run to compare with")
    oracle.add_argument("--out", help="Output file (default: stdout)")
    oracle.set_defaults(handler=cmd_oracle)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.debug:
            set_level("DEBUG")
        elif args.verbose:
            set_level("INFO")
        elif not os.getenv("CONFLICT_FOREST_LOG_LEVEL"):
            set_level(get_settings().logging.level)
        return args.handler(args)
    except CapExceededError as e:
        logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CAP
    except SchedulerInvariantError as e:
        logger.error(f"Internal invariant violated: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except (ConflictForestError, OSError) as e:
        logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

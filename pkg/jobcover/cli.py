import sys
import json
import logging
import argparse

from .error import JobCoverError, InstanceError, ScheduleError, \
    SuiteError, OracleGuardError
from .instance import FORMAT, CostFn, Instance, build_timeline
from .flow import Schedule, validate_schedule
from .lp import TOL, solve_lp
from .rounding import RoundingConfig
from .oracle import brute_force_opt, baseline_heuristics
from .generate import gen_random, gen_three_partition
from .report import solve, run_bench, dumps


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_FALLBACK = 3

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def _write(data, path):
    text = dumps(data)
    if path is None or path == '-':
        print(text)
    else:
        with open(path, 'w') as fp:
            fp.write(text + '\n')


def _read_json(path, error):
    try:
        with open(path) as fp:
            return json.load(fp)
    except (OSError, ValueError) as ex:
        raise error('%s: %s' % (path, ex))


def _config(args):
    return RoundingConfig(
        c=args.c, max_phases=args.max_phases, seed=args.seed, tol=args.tol,
        close_critical=not args.no_closure,
        critical_order=args.critical_order, check=args.check_phases
    )


def cmd_gen(args):
    if args.generator == 'random':
        inst = gen_random(args.n, args.m, args.p_max, args.cost_kind,
                          args.seed)
    else:
        inst = gen_three_partition(args.B, args.triples,
                                   not args.infeasible, args.seed,
                                   args.weight)
    _write(inst.to_dict(), args.output)
    return EXIT_OK


def cmd_solve(args):
    inst = Instance.load(args.instance)
    report, result = solve(inst, _config(args), args.grid, args.brute)
    data = report.to_dict()
    if args.baselines:
        data['baselines'] = baseline_heuristics(inst)
    _write(data, args.output)
    if args.schedule:
        _write(result.schedule.to_dict(), args.schedule)
    if args.trace:
        _write({
            'format': FORMAT,
            'phases': [record.to_dict() for record in result.trace]
        }, args.trace)
    if result.fallback:
        logger.warning('phase cap reached, fallback schedule emitted')
        return EXIT_FALLBACK
    return EXIT_OK


def cmd_bound(args):
    inst = Instance.load(args.instance)
    x, value, cuts = solve_lp(inst, args.tol, weak=args.weak)
    data = {
        'format': FORMAT,
        'lp_value': value,
        'cuts_added': cuts,
        'weak': args.weak,
        'x': x.to_list()
    }
    _write(data, args.output)
    return EXIT_OK


def cmd_brute(args):
    inst = Instance.load(args.instance)
    _write(brute_force_opt(inst).to_dict(), args.output)
    return EXIT_OK


def cmd_check(args):
    inst = Instance.load(args.instance)
    sched = Schedule.from_dict(_read_json(args.schedule, ScheduleError))
    timeline = build_timeline(inst, args.grid)
    completions = sched.completions or [inst.horizon] * inst.n
    valid, report = validate_schedule(inst, timeline, completions, sched)
    data = {'format': FORMAT, 'valid': valid, 'report': report}
    if valid:
        data['cost'] = inst.cost_of(
            [timeline.round_up(c) for c in completions]
        )
    _write(data, args.output)
    return EXIT_OK if valid else EXIT_INVALID


def cmd_bench(args):
    data = _read_json(args.suite, SuiteError)
    res = run_bench(data, config=_config(args), grid=args.grid,
                    brute=not args.no_brute, workers=args.workers,
                    timing=args.timing)
    _write(res, args.output)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='log level: -v info, -vv debug')
    common.add_argument('-o', '--output', default=None,
                        help='output file (default stdout)')
    common.add_argument('--seed', type=int, default=0)
    common.add_argument('--tol', type=float, default=TOL,
                        help='separation tolerance')
    common.add_argument('--grid', choices=('unit', 'compressed'),
                        default='unit', help='schedule timeline')
    common.add_argument('--c', type=float, default=None,
                        help='sampling scale in (0, 0.1]')
    common.add_argument('--max-phases', type=int,
                        default=RoundingConfig.DEFAULT_MAX_PHASES)
    common.add_argument('--critical-order', choices=RoundingConfig.ORDERS,
                        default='alpha')
    common.add_argument('--no-closure', action='store_true',
                        help='reinflate only the sampled cuts')
    common.add_argument('--check-phases', action='store_true',
                        help='separate every reinflated solution')

    parser = argparse.ArgumentParser(
        prog='jobcover',
        description='Preemptive scheduling with general cost functions'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', parents=[common], help='generate instance')
    gen.add_argument('generator', choices=('random', 'three-partition'))
    gen.add_argument('--n', type=int, default=4)
    gen.add_argument('--m', type=int, default=1)
    gen.add_argument('--p-max', type=int, default=3)
    gen.add_argument('--cost-kind', choices=CostFn.KINDS,
                     default='weighted-completion')
    gen.add_argument('--B', type=int, default=8)
    gen.add_argument('--triples', type=int, default=1)
    gen.add_argument('--infeasible', action='store_true')
    gen.add_argument('--weight', type=float, default=1.0)
    gen.set_defaults(func=cmd_gen)

    cmd = sub.add_parser('solve', parents=[common],
                         help='solve and schedule an instance')
    cmd.add_argument('instance')
    cmd.add_argument('--schedule', help='schedule output file')
    cmd.add_argument('--trace', help='phase trace output file')
    cmd.add_argument('--brute', action='store_true',
                     help='add the brute-force optimum')
    cmd.add_argument('--baselines', action='store_true',
                     help='add list-scheduling baseline costs')
    cmd.set_defaults(func=cmd_solve)

    cmd = sub.add_parser('bound', parents=[common], help='LP lower bound')
    cmd.add_argument('instance')
    cmd.add_argument('--weak', action='store_true',
                     help='plain min-cut relaxation')
    cmd.set_defaults(func=cmd_bound)

    cmd = sub.add_parser('brute', parents=[common],
                         help='brute-force optimum')
    cmd.add_argument('instance')
    cmd.set_defaults(func=cmd_brute)

    cmd = sub.add_parser('check', parents=[common],
                         help='validate a schedule file')
    cmd.add_argument('instance')
    cmd.add_argument('schedule')
    cmd.set_defaults(func=cmd_check)

    cmd = sub.add_parser('bench', parents=[common], help='run a suite')
    cmd.add_argument('suite')
    cmd.add_argument('--workers', type=int, default=None)
    cmd.add_argument('--timing', action='store_true',
                     help='include wall times')
    cmd.add_argument('--no-brute', action='store_true')
    cmd.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    """Command line entry point.

    Returns
    -------
    `int`
        Exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)],
        format='%(levelname)s %(name)s: %(message)s'
    )
    try:
        return args.func(args)
    except (InstanceError, ScheduleError, SuiteError, OracleGuardError,
            ValueError) as ex:
        logger.error('%s', ex)
        return EXIT_USAGE
    except JobCoverError as ex:
        logger.error('%s: %s', type(ex).__name__, ex)
        return EXIT_INVALID

from .instance import CostFn, Job, Instance, Timeline, build_timeline
from .flow import Schedule, build_flow_graph, is_valid, extract_schedule, \
    validate_schedule
from .lp import FracSolution, CutConstraint, separate, solve_lp
from .rounding import RoundingConfig, Rounding, run
from .oracle import brute_force_opt
from .generate import gen_random, gen_three_partition
from .report import RunReport, solve

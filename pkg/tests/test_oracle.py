import pytest

from jobcover.error import OracleGuardError
from jobcover.instance import build_timeline
from jobcover.flow import is_valid
from jobcover.lp import FracSolution, solve_lp
from jobcover.generate import gen_random
from jobcover.oracle import OracleResult, brute_force_opt, \
    slot_schedulability, naive_separation, mcnaughton_feasible, \
    list_schedule, baseline_heuristics

from .conftest import make_instance, exhaustive_family


@pytest.mark.parametrize('test,res', [
    (make_instance(1, (2, 2)), (6, (2, 4))),
    (make_instance(1, (2, 2), w=(10, 1)), (24, (2, 4))),
    (make_instance(1, (3,), 'tardiness', d=3), (0, (3,))),
    (make_instance(2, (1, 1)), (2, (1, 1)))
])
def test_brute_force_opt(test, res):
    opt = brute_force_opt(test)
    assert (opt.opt_cost, opt.opt_completions) == res
    assert opt.nodes >= 1
    assert is_valid(test, build_timeline(test), opt.opt_completions)
    assert opt == OracleResult(*res, 0)
    assert opt.to_dict()['format'] == 1


def test_brute_force_opt_nodes(instance_a):
    assert brute_force_opt(instance_a).nodes == 4


@pytest.mark.parametrize('test', [
    make_instance(1, [1] * 7),
    make_instance(1, (7, 6))
])
def test_brute_force_opt_guard(test):
    with pytest.raises(OracleGuardError):
        brute_force_opt(test)


@pytest.mark.parametrize('test,res', [
    ((make_instance(1, (2, 2)), (2, 4)), True),
    ((make_instance(1, (2, 2)), (2, 2)), False),
    ((make_instance(2, (2, 2, 2)), (3, 3, 3)), True),
    ((make_instance(2, (2, 2, 2)), (2, 3, 3)), True),
    ((make_instance(2, (2, 2, 2)), (2, 2, 3)), False),
    ((make_instance(1, (2, 2)), (1, 4)), False),
    ((make_instance(1, (2, 2)), (2,)), False)
])
def test_slot_schedulability(test, res):
    assert slot_schedulability(*test) == res


@pytest.mark.parametrize('test', [
    make_instance(1, (1, 1, 1, 1)),
    make_instance(3, (1, 1, 1)),
    make_instance(1, (5, 5))
])
def test_slot_schedulability_guard(test):
    with pytest.raises(OracleGuardError):
        slot_schedulability(test, [test.H] * test.n)


def test_slot_matches_flow():
    cases = 0
    for inst, completions in exhaustive_family():
        timeline = build_timeline(inst)
        assert slot_schedulability(inst, completions) == \
            is_valid(inst, timeline, completions), (inst, completions)
        cases += 1
    assert cases > 1000


def test_naive_separation(instance_a):
    x = FracSolution.from_completions((2, 2), 4)
    cut = naive_separation(instance_a, x)
    assert (cut.b, cut.D, cut.V) == (3, (0, 0), 2)
    assert cut.violation(x) == 2
    assert naive_separation(instance_a,
                            FracSolution.from_completions((4, 4), 4)) is None
    with pytest.raises(OracleGuardError):
        naive_separation(make_instance(1, (4, 3)),
                         FracSolution.from_completions((7, 7), 7))


@pytest.mark.parametrize('test,res', [
    ((make_instance(2, (3, 3, 3)), 5), True),
    ((make_instance(2, (3, 3, 3)), 4), False),
    ((make_instance(1, (5,)), 4), False)
])
def test_mcnaughton_feasible(test, res):
    assert mcnaughton_feasible(*test) == res


@pytest.mark.parametrize('test,res', [
    ((make_instance(1, (2, 2)), (0, 1)), [2, 4]),
    ((make_instance(1, (2, 2)), (1, 0)), [4, 2]),
    ((make_instance(2, (3, 1, 1)), (1, 2, 0)), [4, 1, 1])
])
def test_list_schedule(test, res):
    assert list_schedule(*test) == res


@pytest.mark.parametrize('test,res', [
    (make_instance(1, (2, 2), w=(10, 1)), {'wspt': 24}),
    (make_instance(2, (1, 1)), {'wspt': 2}),
    (make_instance(1, (2, 1), 'throughput', w=(2, 1), d=(3, 1)),
     {'wspt': 1, 'edf': 0}),
    (make_instance(1, (2, 2), 'weighted-completion', w=(0, 1)),
     {'wspt': 2})
])
def test_baseline_heuristics(test, res):
    assert baseline_heuristics(test) == res


def test_bounds_order():
    checked = 0
    for seed in range(200):
        n = 1 + seed % 4
        kind = ('weighted-completion', 'tardiness', 'throughput',
                'weighted-knorm')[seed % 4]
        inst = gen_random(n, 1 + seed % 2, (8, 4, 2, 2)[n - 1], kind, seed)
        _, lp_value, _ = solve_lp(inst)
        opt = brute_force_opt(inst).opt_cost
        assert lp_value <= opt + 1e-6, inst
        for cost in baseline_heuristics(inst).values():
            assert cost >= opt - 1e-6
        checked += 1
    assert checked >= 200


def test_lp_matches_opt(instance_a):
    _, lp_value, _ = solve_lp(instance_a)
    assert lp_value == pytest.approx(6)
    assert brute_force_opt(instance_a).opt_cost == 6

import math
import pytest

from jobcover.error import InstanceError
from jobcover.instance import CostFn, Job, Instance, Timeline, \
    eval_cost, marginal_cost, build_timeline

from jobcover.generate import gen_random

from .conftest import make_instance


@pytest.mark.parametrize('test,res', [
    ((CostFn('weighted-completion', w=2), 5), 10),
    ((CostFn('throughput', w=5, d=3), 3), 0),
    ((CostFn('throughput', w=5, d=3), 4), 5),
    ((CostFn('tardiness', w=2, d=3), 5), 4),
    ((CostFn('tardiness', w=2, d=3), 2), 0),
    ((CostFn('weighted-knorm', w=2, k=2), 3), 18),
    ((CostFn('exponential', w=1), 0), 0),
    ((CostFn('step-table', table=[(2, 1), (4, 5)]), 1), 0),
    ((CostFn('step-table', table=[(2, 1), (4, 5)]), 3), 1),
    ((CostFn('step-table', table=[(2, 1), (4, 5)]), 4), 5)
])
def test_eval_cost(test, res):
    assert eval_cost(*test) == res


def test_exponential_cost():
    fn = CostFn('exponential', w=2)
    assert fn(1) == pytest.approx(2 * (math.e - 1))
    assert fn(10000) == math.inf


@pytest.mark.parametrize('test,res', [
    ((Job(0, 1, CostFn('weighted-completion', w=3)), 7), 3),
    ((Job(0, 1, CostFn('throughput', w=5, d=3)), 4), 5),
    ((Job(0, 1, CostFn('throughput', w=5, d=3)), 5), 0),
    ((Job(0, 1, CostFn('tardiness', w=1, d=3)), 3), 0)
])
def test_marginal_cost(test, res):
    assert marginal_cost(*test) == res


@pytest.mark.parametrize('kind', CostFn.KINDS)
def test_cost_shape(kind):
    if kind == 'step-table':
        fn = CostFn(kind, table=[(1, 1), (3, 4), (6, 4)])
    else:
        fn = CostFn(kind, w=3, k=2, d=2)
    values = [fn(t) for t in range(12)]
    assert values[0] == 0
    assert all(v >= 0 for v in values)
    assert all(a <= b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize('test', [
    ('unknown', {}),
    ('weighted-completion', {'w': -1}),
    ('weighted-knorm', {'k': 0.5}),
    ('throughput', {'d': -1}),
    ('step-table', {}),
    ('step-table', {'table': [(0, 1)]}),
    ('step-table', {'table': [(2, 1), (2, 3)]}),
    ('step-table', {'table': [(1, 3), (2, 1)]}),
    ('step-table', {'table': [(1, 'x')]})
])
def test_cost_errors(test):
    kind, kwargs = test
    with pytest.raises(InstanceError):
        CostFn(kind, **kwargs)


@pytest.mark.parametrize('test', [
    (0, (1,), None),
    (1, (0,), None),
    (1, (2, 2), 3),
    (2, (3, 3, 3), 4),
    (1, (5,), 4)
])
def test_instance_errors(test):
    m, p, horizon = test
    with pytest.raises(InstanceError):
        make_instance(m, p, horizon=horizon)


def test_instance(instance_a):
    assert instance_a.n == 2
    assert instance_a.H == 4
    assert instance_a.P == 2
    assert instance_a.total_p == 4
    assert instance_a.cost_table.shape == (2, 5)
    assert instance_a.marginal_table[0].tolist() == [0, 1, 1, 1, 1]
    assert instance_a.cost_of((2, 4)) == 6


def test_instance_json(instance_a_weighted):
    inst = make_instance(2, (1, 2, 3), 'tardiness', horizon=5, w=2,
                         d=(1, 2, 3))
    for src in (instance_a_weighted, inst):
        text = src.to_json()
        assert '"format": 1' in text
        assert Instance.from_json(text) == src
    assert Instance.from_json(inst.to_json()).horizon == 5


@pytest.mark.parametrize('test', [
    '{',
    '[]',
    '{"format": 2, "machines": 1, "jobs": []}',
    '{"jobs": []}',
    '{"machines": 1, "jobs": {}}',
    '{"machines": 1, "jobs": [{"cost": {"kind": "throughput"}}]}',
    '{"machines": 1, "jobs": [{"p": 1}]}',
    '{"machines": 1, "jobs": [{"p": 1, "cost": {"kind": "x"}}]}',
    '{"machines": "1", "jobs": []}',
    '{"machines": true, "jobs": []}',
    '{"machines": 1, "jobs": [{"p": null, "cost": {"kind": "throughput"}}]}',
    '{"machines": 1, "jobs": [{"p": 1.5, "cost": {"kind": "throughput"}}]}',
    '{"machines": 1, "jobs": [{"p": true, "cost": {"kind": "throughput"}}]}',
    '{"machines": 1, "horizon": "4", "jobs": []}',
    '{"machines": 1, "horizon": 1, "jobs": '
    '[{"p": 2, "cost": {"kind": "throughput"}}]}'
])
def test_instance_parse_errors(test):
    with pytest.raises(InstanceError):
        Instance.from_json(test)


def test_instance_load(tmp_path, instance_a):
    path = tmp_path / 'a.json'
    path.write_text(instance_a.to_json())
    assert Instance.load(str(path)) == instance_a
    with pytest.raises(InstanceError):
        Instance.load(str(tmp_path / 'missing.json'))


def test_timeline():
    timeline = Timeline((2, 3, 7))
    assert timeline.lengths == (2, 1, 4)
    assert timeline.K == 3
    assert timeline.horizon == 7
    assert not timeline.is_unit
    assert timeline.start(2) == 3
    assert [timeline.interval_of(t) for t in (1, 2, 3, 4, 7)] == \
        [0, 0, 1, 2, 2]
    assert [timeline.round_up(t) for t in (0, 1, 3, 5)] == [0, 2, 3, 7]
    with pytest.raises(ValueError):
        timeline.interval_of(8)
    with pytest.raises(ValueError):
        Timeline((2, 2))


@pytest.mark.parametrize('test,res', [
    ((make_instance(1, (2, 2)), 'unit'), (1, 2, 3, 4)),
    ((make_instance(1, (8,)), 'compressed'), (1, 2, 4, 8)),
    ((make_instance(1, (4, 4)), 'compressed'), (1, 2, 4, 8)),
    ((make_instance(1, (3, 3), 'throughput', w=5, d=4), 'compressed'),
     (5, 6))
])
def test_build_timeline(test, res):
    timeline = build_timeline(*test)
    assert timeline.breakpoints == res
    if test[1] == 'unit':
        assert timeline.lengths == (1,) * len(res)


def test_build_timeline_mode(instance_a):
    with pytest.raises(ValueError):
        build_timeline(instance_a, 'dense')


@pytest.mark.parametrize('kind', CostFn.KINDS)
def test_marginal_cost_telescopes(kind):
    inst = gen_random(4, 2, 3, kind, seed=11)
    for job in inst.jobs:
        total = 0.0
        for t in range(1, inst.H + 1):
            total += marginal_cost(job, t)
            assert total == pytest.approx(eval_cost(job.cost, t))


@pytest.mark.parametrize('kind', CostFn.KINDS)
def test_compressed_timeline_on_grid(kind):
    for seed in range(4):
        inst = gen_random(5, 2, 4, kind, seed=seed)
        timeline = build_timeline(inst, 'compressed')
        assert set(timeline.breakpoints) <= set(range(1, inst.H + 1))
        assert timeline.horizon == inst.H
        assert timeline.K <= inst.H

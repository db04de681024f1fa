import json
import pytest

from jobcover.cli import main, build_parser, EXIT_OK, EXIT_INVALID, \
    EXIT_USAGE, EXIT_FALLBACK


@pytest.fixture
def instance_file(tmp_path, instance_a):
    path = tmp_path / 'a.json'
    path.write_text(instance_a.to_json())
    return str(path)


def read(path):
    with open(path) as fp:
        return json.load(fp)


def test_gen(tmp_path, capsys):
    assert main(['gen', 'random', '--n', '3', '--seed', '4']) == EXIT_OK
    first = json.loads(capsys.readouterr().out)
    out = str(tmp_path / 'g.json')
    assert main(['gen', 'random', '--n', '3', '--seed', '4',
                 '-o', out]) == EXIT_OK
    assert read(out) == first
    assert first['format'] == 1
    assert len(first['jobs']) == 3


def test_gen_three_partition(capsys):
    assert main(['gen', 'three-partition', '--B', '8', '--triples', '2']) \
        == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['machines'] == 2
    assert sum(job['p'] for job in data['jobs']) == 16


@pytest.mark.parametrize('test', [
    ['gen', 'random', '--n', '0'],
    ['gen', 'three-partition', '--B', '3'],
    ['solve', 'missing.json'],
    ['solve', 'x.json', '--c', '0.5']
])
def test_usage_errors(test, tmp_path):
    (tmp_path / 'x.json').write_text('{"machines": 1, "jobs": []}')
    test = [str(tmp_path / a) if a.endswith('.json') else a for a in test]
    assert main(test) == EXIT_USAGE


def test_parse_errors():
    with pytest.raises(SystemExit) as ex:
        main(['solve'])
    assert ex.value.code == 2
    with pytest.raises(SystemExit):
        build_parser().parse_args(['frobnicate'])


def test_solve_malformed(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{"machines": 1, "jobs": [')
    assert main(['solve', str(path)]) == EXIT_USAGE


@pytest.mark.parametrize('test', [
    '{"machines": 1, "jobs": [{"p": null, "cost": {"kind": "throughput"}}]}',
    '{"machines": true, "jobs": [{"p": 1, "cost": {"kind": "throughput"}}]}',
    '{"machines": 1, "jobs": [{"p": "2", "cost": {"kind": "throughput"}}]}'
])
def test_solve_bad_fields(test, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(test)
    assert main(['solve', str(path)]) == EXIT_USAGE


def test_solve(tmp_path, instance_file):
    out = str(tmp_path / 'report.json')
    sched = str(tmp_path / 'schedule.json')
    trace = str(tmp_path / 'trace.json')
    assert main(['solve', instance_file, '--seed', '1', '--brute',
                 '--baselines', '-o', out, '--schedule', sched,
                 '--trace', trace]) == EXIT_OK
    report = read(out)
    assert report['lp_value'] == pytest.approx(6)
    assert report['alg_cost'] >= 6
    assert report['brute_cost'] == 6
    assert report['seed'] == 1
    assert report['baselines'] == {'wspt': 6}
    assert read(sched)['format'] == 1
    assert read(trace)['phases']
    assert main(['check', instance_file, sched, '-o',
                 str(tmp_path / 'check.json')]) == EXIT_OK
    assert read(str(tmp_path / 'check.json'))['valid']


def test_solve_compressed(tmp_path, instance_file):
    sched = str(tmp_path / 'schedule.json')
    assert main(['solve', instance_file, '--grid', 'compressed',
                 '--schedule', sched, '-o', str(tmp_path / 'r.json')]) \
        == EXIT_OK
    assert main(['check', instance_file, sched, '--grid', 'compressed',
                 '-o', str(tmp_path / 'c.json')]) == EXIT_OK


def test_solve_fallback(tmp_path, instance_file):
    sched = str(tmp_path / 'schedule.json')
    assert main(['solve', instance_file, '--max-phases', '0',
                 '--schedule', sched, '-o', str(tmp_path / 'r.json')]) \
        == EXIT_FALLBACK
    assert read(str(tmp_path / 'r.json'))['fallback']
    assert main(['check', instance_file, sched,
                 '-o', str(tmp_path / 'c.json')]) == EXIT_OK


def test_check_invalid(tmp_path, instance_file, capsys):
    sched = tmp_path / 'schedule.json'
    sched.write_text(json.dumps({
        'format': 1,
        'completions': [2, 4],
        'intervals': [
            {'t_end': t, 'machines': [[[0, 1]]]} for t in (1, 2, 3, 4)
        ]
    }))
    assert main(['check', instance_file, str(sched)]) == EXIT_INVALID
    data = json.loads(capsys.readouterr().out)
    assert not data['valid']
    assert 'violation' in data['report']


def test_check_malformed(tmp_path, instance_file):
    sched = tmp_path / 'schedule.json'
    sched.write_text('{"intervals": 1}')
    assert main(['check', instance_file, str(sched)]) == EXIT_USAGE


@pytest.mark.parametrize('test,res', [
    ([], (6, False)),
    (['--weak'], (6, True))
])
def test_bound(instance_file, capsys, test, res):
    assert main(['bound', instance_file] + test) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['lp_value'] == pytest.approx(res[0])
    assert data['weak'] == res[1]
    assert len(data['x']) == 2
    assert isinstance(data['cuts_added'], int)
    assert data['cuts_added'] >= 0
    assert 'cuts' not in data


def test_brute(instance_file, capsys):
    assert main(['brute', instance_file]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['opt_cost'] == 6
    assert data['opt_completions'] == [2, 4]


def test_brute_guard(tmp_path):
    path = tmp_path / 'big.json'
    path.write_text(json.dumps({
        'machines': 1,
        'jobs': [{'p': 1, 'cost': {'kind': 'weighted-completion'}}] * 7
    }))
    assert main(['brute', str(path)]) == EXIT_USAGE


def test_bench(tmp_path):
    suite = tmp_path / 'suite.json'
    suite.write_text(json.dumps({
        'format': 1,
        'instances': [{'generator': 'random', 'n': 2, 'm': 1, 'p_max': 2,
                       'seeds': [0, 2]}]
    }))
    outs = [str(tmp_path / name) for name in ('a.json', 'b.json')]
    for out in outs:
        assert main(['bench', str(suite), '--c', '0.1', '-o', out]) \
            == EXIT_OK
    with open(outs[0]) as a, open(outs[1]) as b:
        assert a.read() == b.read()
    data = read(outs[0])
    assert data['aggregate']['count'] == 2


def test_bench_empty(tmp_path):
    suite = tmp_path / 'suite.json'
    suite.write_text('{"format": 1, "instances": []}')
    out = str(tmp_path / 'out.json')
    assert main(['bench', str(suite), '-o', out]) == EXIT_OK
    assert read(out)['instances'] == []


def test_bench_bad_suite(tmp_path):
    suite = tmp_path / 'suite.json'
    suite.write_text('{"instances": [{"generator": "x"}]}')
    assert main(['bench', str(suite)]) == EXIT_USAGE

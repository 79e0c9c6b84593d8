import json

import pytest

from levydiv import BrownianDrift, CramerLundbergExp, SimConfig, run_suite
from levydiv.verification import CheckResult, default_models, report_json

CL = CramerLundbergExp(2.0, 1.0, 1.0)


@pytest.mark.slow
def test_deterministic_suites_pass():
    results = run_suite("all", monte_carlo=False)
    failed = [r for r in results if not r.passed]
    assert not failed, failed
    ids = [r.check_id for r in results]
    assert ids == sorted(ids)
    assert len(ids) == len(set(ids))


def test_every_family_and_rate_covered():
    ids = [r.check_id for r in run_suite("scale")]
    for m in default_models():
        for q in ("0.1", "1"):
            assert f"scale.laplace_identity[{m.label()},q={q}]" in ids


def test_monte_carlo_subset():
    cfg = SimConfig(n_paths=20_000, seed=3)
    results = run_suite("exit", models=[CL], q_list=[0.1], cfg=cfg)
    mc = [r for r in results if ".mc." in r.check_id]
    assert len(mc) == 5 and all(r.passed for r in mc)
    assert all(r.tolerance_kind == "StdErr(3)" for r in mc)


def test_report_round_trip():
    results = run_suite("barrier", models=[BrownianDrift(1.0, 1.0)], q_list=[0.1], monte_carlo=False)
    data = json.loads(report_json(results))
    assert [CheckResult(**d) for d in data] == [
        CheckResult(**json.loads(json.dumps(r.to_dict()))) for r in results
    ]
    assert set(data[0]) == {"check_id", "target", "estimate", "tolerance_kind", "passed", "detail"}


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("everything")

import pytest

import railnet


def small_instance(seed=2, **kwargs):
    return railnet.generate(seed=seed, nodes=4, sections=4, trains={"IC": 1, "RE": 2}, **kwargs)


def test_generate_is_deterministic():
    a = small_instance()
    assert a == small_instance()
    assert a["schema_version"] == railnet.schema_version
    assert len(a["infrastructure"]["nodes"]) == 4


def test_solve_and_validate():
    inst = small_instance()
    report, plan = railnet.solve(inst)
    assert report["status"] == "Optimal"
    assert report["validation"]["ok"]
    check = railnet.validate(plan, inst)
    assert check["ok"]
    assert check["cost"] == pytest.approx(report["objective"])


def test_broken_plan_is_rejected():
    inst = small_instance()
    _, plan = railnet.solve(inst)
    plan["arcs"] = []
    check = railnet.validate(plan, inst)
    assert not check["ok"]
    assert check["violations"]


def test_config_chain():
    inst = small_instance(seed=5)
    costs = [railnet.solve(inst, config=c)[0]["objective"] for c in "ABC"]
    assert costs[0] <= costs[1] <= costs[2]


def test_emit_model_text():
    text = railnet.emit_model(small_instance())
    assert text.startswith("\\")
    assert "Subject To" in text
    assert text.rstrip().endswith("End")


def test_sweep_rows():
    rows = railnet.sweep(small_instance(scenarios=3), [40, 80])
    assert len(rows) == 2
    assert all(r["status"] == "Optimal" for r in rows)


def test_schema_errors_raise():
    inst = small_instance()
    inst["surplus"] = 1
    with pytest.raises(railnet.DocumentError):
        railnet.solve(inst)
    with pytest.raises(ValueError):
        railnet.solve(small_instance(), config="Z")

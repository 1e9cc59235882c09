"""Railway network design from timetable families."""

import json

from . import _core
from ._core import DocumentError, InfeasibleInstance, schema_version

__all__ = [
    "DocumentError",
    "InfeasibleInstance",
    "emit_model",
    "generate",
    "schema_version",
    "solve",
    "sweep",
    "validate",
]


def _text(instance):
    return instance if isinstance(instance, str) else json.dumps(instance)


def generate(seed=1, nodes=5, sections=6, trains=None, scenarios=1, optional_share=0.0, coverage_share=1.0,
             config="B"):
    """Generate an instance document as a dict."""
    trains = trains or {"IC": 1, "RE": 2}
    return json.loads(_core.generate(seed, nodes, sections, trains, scenarios, optional_share, coverage_share,
                                     config))


def solve(instance, config=None, time_limit=7200.0):
    """Solve an instance (dict or JSON text); returns (report, plan or None)."""
    report, plan = _core.solve(_text(instance), config, time_limit)
    return json.loads(report), (json.loads(plan) if plan else None)


def emit_model(instance, config=None):
    """MILP of an instance as LP text."""
    return _core.emit_model(_text(instance), config)


def validate(plan, instance):
    """Check a plan against an instance; returns a dict with ok, cost and violations."""
    return json.loads(_core.validate(_text(plan), _text(instance)))


def sweep(instance, percents, time_limit=7200.0):
    """Coverage sweep; returns one dict per row."""
    lines = _core.sweep(_text(instance), list(percents), time_limit).splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]

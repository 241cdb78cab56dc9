"""JSON documents for instances and solve reports.

Rationals are always written as ``"p/q"`` strings. A table valuation is a
list of ``2**m`` entries indexed by bitmask (bit ``j`` set = project ``j``
funded).
"""

from __future__ import annotations

import json
from fractions import Fraction

from poolpb.core import (
    Additive,
    Agent,
    Instance,
    Outcome,
    Project,
    SingleMinded,
    SolveReport,
    Symmetric,
    Table,
    as_rational,
    fmt_rational,
)
from poolpb.errors import ParseError, SchemaError


def _rat(x) -> str:
    return fmt_rational(Fraction(x))


def valuation_to_dict(v) -> dict:
    if isinstance(v, Additive):
        return {"type": "additive", "values": [_rat(x) for x in v.values]}
    if isinstance(v, SingleMinded):
        return {"type": "single_minded", "demand": sorted(v.demand), "value": _rat(v.value)}
    if isinstance(v, Symmetric):
        return {"type": "symmetric", "by_count": [_rat(x) for x in v.by_count]}
    if isinstance(v, Table):
        return {"type": "table", "entries": [_rat(x) for x in v.entries]}
    raise TypeError(type(v))


def instance_to_dict(I: Instance) -> dict:
    return {
        "projects": [{"name": p.name, "cost": _rat(p.cost)} for p in I.projects],
        "agents": [{"budget": _rat(a.budget), "valuation": valuation_to_dict(a.valuation)} for a in I.agents],
    }


def save_instance(I: Instance) -> str:
    return json.dumps(instance_to_dict(I), indent=1) + "\n"


def _field(obj, key, path):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key)
    return obj[key]


def _number(x, path) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise SchemaError(path, "expected a rational string such as \"3/4\"")
    try:
        return as_rational(x)
    except (TypeError, ValueError) as exc:
        raise SchemaError(path, str(exc)) from None


def _list(x, path) -> list:
    if not isinstance(x, list):
        raise SchemaError(path, "expected a list")
    return x


def valuation_from_dict(d, path):
    kind = _field(d, "type", path)
    if kind == "additive":
        vals = _list(_field(d, "values", path), f"{path}.values")
        return Additive(tuple(_number(x, f"{path}.values[{k}]") for k, x in enumerate(vals)))
    if kind == "single_minded":
        demand = _list(_field(d, "demand", path), f"{path}.demand")
        if not all(isinstance(j, int) and not isinstance(j, bool) for j in demand):
            raise SchemaError(f"{path}.demand", "expected project indices")
        return SingleMinded(frozenset(demand), _number(_field(d, "value", path), f"{path}.value"))
    if kind == "symmetric":
        vals = _list(_field(d, "by_count", path), f"{path}.by_count")
        return Symmetric(tuple(_number(x, f"{path}.by_count[{k}]") for k, x in enumerate(vals)))
    if kind == "table":
        vals = _list(_field(d, "entries", path), f"{path}.entries")
        return Table(tuple(_number(x, f"{path}.entries[{k}]") for k, x in enumerate(vals)))
    raise SchemaError(f"{path}.type", f"unknown valuation type {kind!r}")


def instance_from_dict(doc) -> Instance:
    projects = []
    for k, p in enumerate(_list(_field(doc, "projects", ""), "projects")):
        path = f"projects[{k}]"
        name = p.get("name") if isinstance(p, dict) else None
        if name is not None and not isinstance(name, str):
            raise SchemaError(f"{path}.name", "expected a string")
        projects.append(Project(_number(_field(p, "cost", path), f"{path}.cost"), name))
    agents = []
    for i, a in enumerate(_list(_field(doc, "agents", ""), "agents")):
        path = f"agents[{i}]"
        budget = _number(_field(a, "budget", path), f"{path}.budget")
        agents.append(Agent(budget, valuation_from_dict(_field(a, "valuation", path), f"{path}.valuation")))
    return Instance(tuple(projects), tuple(agents))


def parse_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def load_instance(text: str) -> Instance:
    return instance_from_dict(parse_json(text))


def report_to_dict(I: Instance, r: SolveReport) -> dict:
    return {
        "algorithm": r.algorithm,
        "epsilon": None if r.epsilon is None else _rat(r.epsilon),
        "funded": sorted(r.outcome.funded),
        "payments": [_rat(x) for x in r.outcome.payments],
        "welfare": _rat(r.welfare),
        "excess": _rat(r.excess),
        "instance": instance_to_dict(I),
    }


def outcome_from_dict(doc) -> tuple:
    """Read a report document back as ``(instance, outcome)``."""
    I = instance_from_dict(_field(doc, "instance", ""))
    funded = _list(_field(doc, "funded", ""), "funded")
    if not all(isinstance(j, int) and not isinstance(j, bool) for j in funded):
        raise SchemaError("funded", "expected project indices")
    payments = [_number(x, f"payments[{k}]") for k, x in enumerate(_list(_field(doc, "payments", ""), "payments"))]
    return I, Outcome(frozenset(funded), tuple(payments))

"""Reader for Pabulib ``.pb`` election files and conversion to pooled instances.

A ``.pb`` file has three sections (``META``, ``PROJECTS``, ``VOTES``), each
introduced by its name on a line of its own and followed by a
semicolon-separated header row and data rows. Only approval ballots are
supported.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from poolpb.core import Additive, Agent, Instance, Project
from poolpb.errors import NoApprovals, NoVoters, ParseError, UnsupportedVoteType

SECTIONS = ("META", "PROJECTS", "VOTES")


@dataclass(frozen=True)
class PabulibProject:
    project_id: str
    cost: Fraction
    name: Optional[str] = None
    extra: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class PabulibElection:
    meta: dict
    projects: tuple
    votes: tuple  # (voter_id, tuple of approved project ids)

    @property
    def budget(self) -> Fraction:
        return parse_decimal(self.meta["budget"], "budget")


def parse_decimal(text: str, what: str, line=None) -> Fraction:
    s = text.strip().replace(" ", "")
    if "," in s and "." not in s:
        s = s.replace(",", ".")
    try:
        x = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{what}: {text!r} is not a decimal number", line) from None
    if x < 0:
        raise ParseError(f"{what}: {text!r} is negative", line)
    return x


def _section_name(row):
    cells = [c.strip() for c in row if c.strip()]
    if len(cells) == 1 and cells[0].upper() in SECTIONS:
        return cells[0].upper()
    return None


def parse_pabulib(text: str) -> PabulibElection:
    rows = {s: [] for s in SECTIONS}
    headers = {}
    current = None
    reader = csv.reader(io.StringIO(text.lstrip("﻿")), delimiter=";")
    for row in reader:
        line = reader.line_num
        if not any(c.strip() for c in row):
            continue
        name = _section_name(row)
        if name is not None:
            current = name
            if name in headers:
                raise ParseError(f"section {name} appears twice", line)
            headers[name] = None
            continue
        if current is None:
            raise ParseError("data before the first section header", line)
        cells = [c.strip() for c in row]
        if headers[current] is None:
            headers[current] = [c.lower() for c in cells]
            continue
        rows[current].append((line, cells))

    if "META" not in headers:
        raise ParseError("missing META section")
    meta = {}
    for line, cells in rows["META"]:
        if len(cells) < 2:
            raise ParseError("META rows need a key and a value", line)
        meta[cells[0]] = ";".join(cells[1:])
    for key in ("budget", "vote_type", "num_votes"):
        if key not in meta:
            raise ParseError(f"META lacks required key {key!r}")
    if meta["vote_type"].strip().lower() != "approval":
        raise UnsupportedVoteType(f"vote_type {meta['vote_type']!r}; only approval ballots are supported")
    parse_decimal(meta["budget"], "budget")

    projects = []
    ids = set()
    hdr = headers.get("PROJECTS") or []
    if rows["PROJECTS"] and not {"project_id", "cost"} <= set(hdr):
        raise ParseError("PROJECTS header must include project_id and cost")
    for line, cells in rows["PROJECTS"]:
        rec = dict(zip(hdr, cells))
        pid = rec.get("project_id", "")
        if not pid:
            raise ParseError("project without project_id", line)
        if pid in ids:
            raise ParseError(f"duplicate project id {pid!r}", line)
        ids.add(pid)
        extra = {k: v for k, v in rec.items() if k not in ("project_id", "cost", "name")}
        projects.append(PabulibProject(pid, parse_decimal(rec.get("cost", ""), f"cost of {pid}", line), rec.get("name") or None, extra))

    votes = []
    hdr = headers.get("VOTES") or []
    if rows["VOTES"] and not {"voter_id", "vote"} <= set(hdr):
        raise ParseError("VOTES header must include voter_id and vote")
    for line, cells in rows["VOTES"]:
        rec = dict(zip(hdr, cells))
        approved = tuple(p.strip() for p in rec.get("vote", "").split(",") if p.strip())
        for pid in approved:
            if pid not in ids:
                raise ParseError(f"vote for unknown project {pid!r}", line)
        votes.append((rec.get("voter_id", ""), approved))
    return PabulibElection(meta, tuple(projects), tuple(votes))


def pabulib_to_instance(E: PabulibElection) -> Instance:
    """Split the budget evenly across voters; each approval is worth the same
    amount, scaled so that total value of all projects equals their total cost."""
    if not E.votes:
        raise NoVoters("election has no voters")
    approvals = sum(len(set(v)) for _, v in E.votes)
    if approvals == 0:
        raise NoApprovals("no voter approves any project")
    total_cost = sum((p.cost for p in E.projects), Fraction(0))
    unit = total_cost / approvals
    share = E.budget / len(E.votes)
    index = {p.project_id: j for j, p in enumerate(E.projects)}
    agents = []
    for _, approved in E.votes:
        row = [Fraction(0)] * len(E.projects)
        for pid in set(approved):
            row[index[pid]] = unit
        agents.append(Agent(share, Additive(tuple(row))))
    projects = tuple(Project(p.cost, p.project_id) for p in E.projects)
    return Instance(projects, tuple(agents))

"""Reading and writing instances, Pabulib ingestion and synthetic generators."""

from poolpb.genio.instance_io import (
    instance_from_dict,
    instance_to_dict,
    load_instance,
    outcome_from_dict,
    parse_json,
    report_to_dict,
    save_instance,
)
from poolpb.genio.pabulib import PabulibElection, PabulibProject, pabulib_to_instance, parse_pabulib
from poolpb.genio.synthetic import FAMILIES, SyntheticConfig, gen_synthetic

__all__ = [
    "FAMILIES",
    "PabulibElection",
    "PabulibProject",
    "SyntheticConfig",
    "gen_synthetic",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "outcome_from_dict",
    "pabulib_to_instance",
    "parse_json",
    "parse_pabulib",
    "report_to_dict",
    "save_instance",
]

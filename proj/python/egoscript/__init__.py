"""Python bindings for the egoscript pipeline and evaluation core."""

import json
from os import PathLike
from typing import Any, Iterable, Optional, Union

from . import _core
from ._core import Error, apply_gate, fpr, latency_score, overall_score, safety_criticality

__all__ = [
    "Error",
    "apply_gate",
    "compute_signals",
    "error_detail",
    "evaluate_from_fixtures",
    "export_report",
    "fpr",
    "latency_score",
    "overall_score",
    "run_pipeline",
    "safety_criticality",
    "schema_document",
    "step_artifact",
    "validate_script_yaml",
]

Json = Any


def error_detail(exc: Error) -> dict:
    """The machine-readable error body carried by an ``Error``."""
    return json.loads(str(exc))["error"]


def compute_signals(trace: Iterable[dict], smoothing_window: int = 3, aggregator: str = "max") -> dict:
    return json.loads(_core._compute_signals(json.dumps(list(trace)), smoothing_window, aggregator))


def validate_script_yaml(text: str) -> list:
    """Every violation found in a script.yaml document; empty when valid."""
    return json.loads(_core._validate_script_yaml(text))


def evaluate_from_fixtures(
    script_yaml: str,
    vlm_raw: str,
    judge_raw: str,
    alignment_score: Optional[float] = 0.9,
    hazard_category: str = "",
    trace: Optional[Iterable[dict]] = None,
    config_yaml: Optional[str] = None,
) -> dict:
    trace_json = None if trace is None else json.dumps(list(trace))
    return json.loads(
        _core._evaluate_from_fixtures(
            script_yaml, vlm_raw, judge_raw, alignment_score, hazard_category, trace_json, config_yaml
        )
    )


def export_report(scores: Iterable[dict], format: str = "json") -> Union[str, dict]:
    doc = _core._export_report(json.dumps(list(scores)), format)
    return json.loads(doc) if format == "json" else doc


def run_pipeline(project_dir: Union[str, PathLike], scenario: dict, config_yaml: Optional[str] = None) -> dict:
    return json.loads(_core._run_pipeline(str(project_dir), json.dumps(scenario), config_yaml))


def step_artifact(project_dir: Union[str, PathLike], step: int) -> dict:
    return json.loads(_core._step_artifact(str(project_dir), step))


def schema_document() -> dict:
    return json.loads(_core._schema_document())

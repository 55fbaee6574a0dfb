"""Producers of property estimates: oracle, table replay, seeded noise, chat."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..benchmark.dataset import BenchmarkObject, UnknownObject, find_object, load_dataset
from ..benchmark.stats import canonical_config, mass_column, mass_error_stats
from ..controller import PropertyEstimate
from ..fixtures import rows_by_name
from ..physics import DEFAULT_GRIPPER
from .aggregate import aggregate_mode
from .chat import ChatClient, ChatConfig
from .descriptor import DescriptorDoc, DescriptorError, parse_descriptor
from .prompts import render_thinker_prompt

KINDS = ("oracle", "table_replay", "noisy", "external_chat")
CONFIGS = ("DG4", "DG35", "DG_D", "DG_FT", "DG_CoT35", "DG_CoT4", "DG_FT_CoT")
COT_CONFIGS = {"DG_CoT35", "DG_CoT4", "DG_FT_CoT"}
ORACLE_MU = 0.33
ORACLE_DX = 2.0
NOISE_SIGMA_LN = 0.5

__all__ = [
    "EstimatorSpec", "estimate", "ParseFailure", "UnknownObject", "doc_to_estimate",
]


class ParseFailure(ValueError):
    def __init__(self, error: DescriptorError, raw: str):
        super().__init__(f"could not parse estimator response: {error}")
        self.error = error
        self.raw = raw


@dataclass(frozen=True)
class EstimatorSpec:
    kind: str = "table_replay"
    model_config: str = "DG4"
    noise_factor: tuple[float, float] | None = None  # (mean factor, sigma of log)
    query_count: int = 10
    endpoint: ChatConfig | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        object.__setattr__(self, "model_config", canonical_config(self.model_config))
        if self.query_count < 1:
            raise ValueError("query_count must be at least 1")
        if self.noise_factor is not None:
            factor, sigma = self.noise_factor
            if factor <= 0 or sigma < 0:
                raise ValueError("noise factor must be positive and sigma non-negative")

    @property
    def label(self) -> str:
        return self.kind if self.kind == "oracle" else f"{self.kind}:{self.model_config}"


def _clamp_goal(width_mm: float) -> float:
    return min(max(width_mm, DEFAULT_GRIPPER.cmd_min), DEFAULT_GRIPPER.cmd_max)


def _replay(spec: EstimatorSpec, obj: BenchmarkObject, width_mm: float) -> PropertyEstimate:
    table = rows_by_name("table4.csv")
    if obj.name not in table:
        raise UnknownObject(obj.name)
    t4 = table[obj.name]
    base = dict(
        mu_est=float(t4["mu"]),
        k_est=float(t4["k[N/m]"]),
        goal_aperture=_clamp_goal(width_mm),
        source=spec.label,
        label=obj.name,
    )
    if spec.model_config == "DG_D":
        t5 = rows_by_name("table5.csv")[obj.name]
        return PropertyEstimate(
            mass_est=float(t4["m[g]"]),
            additional_closure=float(t5["delta_x[mm]"]),
            additional_force_est=float(t5["delta_F_out[N]"]),
            direct_f_min=float(t5["F_min[N]"]),
            **base,
        )
    return PropertyEstimate(
        mass_est=mass_column(spec.model_config)[obj.name],
        additional_closure=float(t4["delta_x[mm]"]),
        additional_force_est=float(t4["delta_F_out[N]"]),
        **base,
    )


def doc_to_estimate(doc: DescriptorDoc, source: str, label: str) -> PropertyEstimate:
    return PropertyEstimate(
        mass_est=doc.mass_g,
        mu_est=doc.mu,
        k_est=doc.k_npm,
        goal_aperture=_clamp_goal(doc.goal_aperture_mm),
        additional_closure=doc.additional_closure_mm,
        additional_force_est=doc.additional_force_n,
        deviation=doc.deviation.direction if doc.deviation else None,
        override_reason=doc.deviation.reason if doc.deviation else "",
        complete_grasp=doc.complete,
        source=source,
        label=label,
    )


def _modal(values):
    return aggregate_mode(values).value


def _external(spec, description, verb, width_mm, client) -> PropertyEstimate:
    if client is None:
        client = ChatClient(spec.endpoint or ChatConfig.load())
    prompt = render_thinker_prompt(description, verb, width_mm, cot=spec.model_config in COT_CONFIGS)
    docs = []
    for raw in client.query_parallel(prompt, spec.query_count):
        try:
            docs.append(parse_descriptor(raw))
        except DescriptorError as e:
            raise ParseFailure(e, raw) from e
    direction = _modal([d.deviation.direction if d.deviation else "" for d in docs])
    reason = next((d.deviation.reason for d in docs if d.deviation and d.deviation.direction == direction), "")
    return PropertyEstimate(
        mass_est=_modal([d.mass_g for d in docs]),
        mu_est=_modal([d.mu for d in docs]),
        k_est=_modal([d.k_npm for d in docs]),
        goal_aperture=_clamp_goal(_modal([d.goal_aperture_mm for d in docs])),
        additional_closure=_modal([d.additional_closure_mm for d in docs]),
        additional_force_est=_modal([d.additional_force_n for d in docs]),
        deviation=direction or None,
        override_reason=reason,
        complete_grasp=_modal([d.complete for d in docs]),
        source=spec.label,
        label=description,
    )


def noisy_factor(spec: EstimatorSpec) -> tuple[float, float]:
    if spec.noise_factor is not None:
        return spec.noise_factor
    return mass_error_stats(spec.model_config), NOISE_SIGMA_LN


def sample_mass_factor(factor: float, sigma_ln: float, rng: np.random.Generator) -> float:
    """Log-normal draw whose mean equals ``factor``."""
    return float(rng.lognormal(np.log(factor) - sigma_ln**2 / 2, sigma_ln))


def estimate(
    spec: EstimatorSpec,
    obj_description: str,
    verb: str = "pick",
    width_mm: float | None = None,
    *,
    objects: list[BenchmarkObject] | None = None,
    seed: int | np.random.Generator | None = 0,
    client: ChatClient | None = None,
) -> PropertyEstimate:
    if spec.kind == "external_chat":
        if width_mm is None:
            raise ValueError("external estimation needs a measured width")
        return _external(spec, obj_description, verb, width_mm, client)

    objects = objects if objects is not None else load_dataset()
    obj = find_object(obj_description, objects)
    if width_mm is None:
        width_mm = obj.model.rest_width + obj.width_bias
    if spec.kind == "table_replay":
        return _replay(spec, obj, width_mm)

    m = obj.model
    mass = m.mass
    if spec.kind == "noisy":
        factor, sigma = noisy_factor(spec)
        mass *= sample_mass_factor(factor, sigma, np.random.default_rng(seed))
    return PropertyEstimate(
        mass_est=mass,
        mu_est=ORACLE_MU,
        k_est=m.k_true,
        goal_aperture=_clamp_goal(width_mm),
        additional_closure=ORACLE_DX,
        source=spec.label,
        label=obj.name,
    )

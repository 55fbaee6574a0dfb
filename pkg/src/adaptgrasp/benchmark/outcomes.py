from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from ..controller import GraspTrace
from ..physics import ObjectModel, damage_check

SUCCESS = "Success"
SLIP = "SlipFailure"
DEFORM = "DeformFailure"
LIMITS = "LimitsExhausted"
RESULTS = (SUCCESS, SLIP, DEFORM, LIMITS)


@dataclass(frozen=True)
class TrialOutcome:
    strategy: str
    object: str
    result: str
    max_force: float
    slip_mm: float
    k_measured: tuple[float, float] | None = None
    seed: int = 0

    @property
    def success(self) -> bool:
        return self.result == SUCCESS

    def to_json(self) -> str:
        d = asdict(self)
        d["k_measured"] = list(self.k_measured) if self.k_measured else None
        return json.dumps(d, sort_keys=True)


def classify_outcome(
    trace: GraspTrace,
    held: bool,
    slip_mm: float,
    obj: ObjectModel,
    strategy: str = "",
    seed: int = 0,
) -> TrialOutcome:
    """Damage outranks slip, which outranks success.

    A grasp that ran out of aperture or force without crossing its threshold
    keeps the LimitsExhausted tag; it scores as a failure like a slip.
    """
    if damage_check(obj, trace.max_true_force):
        result = DEFORM
    elif not held:
        result = LIMITS if trace.limits_exhausted else SLIP
    else:
        result = SUCCESS
    k = None
    if trace.k_measured_mean > 0:
        k = (trace.k_measured_mean, trace.k_measured_max)
    return TrialOutcome(strategy, obj.name, result, trace.max_true_force, slip_mm, k, seed)

from __future__ import annotations

from typing import Sequence

from ..fixtures import rows_by_name

# estimator configuration -> column of the per-model mass-estimate table
MASS_COLUMNS = {
    "DG35": "a",
    "DG_FT": "b",
    "DG4": "c",
    "DG_CoT35": "d",
    "DG_FT_CoT": "e",
    "DG_CoT4": "f",
}
CONFIG_ALIASES = {
    "dg": "DG4", "dg4": "DG4", "dg-4": "DG4",
    "dg35": "DG35", "dg3.5": "DG35", "dg-3.5": "DG35",
    "dg-ft": "DG_FT", "dg_ft": "DG_FT", "dgft": "DG_FT",
    "dg-cot35": "DG_CoT35", "dg_cot35": "DG_CoT35", "dg-cot3.5": "DG_CoT35",
    "dg-cot4": "DG_CoT4", "dg_cot4": "DG_CoT4",
    "dg-ft-cot": "DG_FT_CoT", "dg_ft_cot": "DG_FT_CoT",
    "dg-d": "DG_D", "dg_d": "DG_D",
}


def canonical_config(config: str) -> str:
    if config in MASS_COLUMNS or config == "DG_D":
        return config
    try:
        return CONFIG_ALIASES[config.lower()]
    except KeyError:
        raise ValueError(f"unknown model configuration {config!r}") from None


def mass_column(config: str) -> dict[str, float]:
    """Replayed mass estimate (g) per object for a configuration."""
    col = MASS_COLUMNS[canonical_config(config)]
    return {n: float(r[f"{col}[g]"]) for n, r in rows_by_name("mass_estimates.csv").items()}


def mass_error_stats(config: str) -> float:
    """Mean of the tabulated per-object mass error column."""
    col = MASS_COLUMNS[canonical_config(config)]
    errs = [float(r[f"{col}_err"]) for r in rows_by_name("mass_estimates.csv").values()]
    return sum(errs) / len(errs)


def success_rate(counts: Sequence[int], trials: int = 10) -> float:
    """Aggregate percentage as the mean of per-object success rates."""
    if not counts:
        return 0.0
    return 100.0 * sum(c / trials for c in counts) / len(counts)


def rank_by_compliance(probes: Sequence[tuple[str, float]]) -> list[str]:
    """Labels ordered softest first; equal stiffness keeps input order."""
    if len(probes) < 2:
        raise ValueError("need at least two probes to rank")
    return [label for label, _ in sorted(probes, key=lambda p: p[1])]

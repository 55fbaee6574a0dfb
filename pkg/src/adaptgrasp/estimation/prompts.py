from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .descriptor import fmt_num

CONCEPTS = {
    "mass": "has more mass",
    "fragility": "is more fragile",
    "deformability": "is more deformable",
}


@lru_cache(maxsize=None)
def load_template(cot: bool = False) -> str:
    name = "descriptor_cot.txt" if cot else "descriptor.txt"
    return resources.files("adaptgrasp").joinpath("prompts", name).read_text(encoding="utf-8")


def render_thinker_prompt(description: str, verb: str, width_mm: float, cot: bool = False) -> str:
    """Full descriptor prompt followed by the user instruction."""
    if not description or not description.strip():
        raise ValueError("object description must be non-empty")
    if not verb or not verb.strip():
        raise ValueError("grasp verb must be non-empty")
    return (
        load_template(cot)
        + "\n"
        + f"User instruction: {verb.strip()} the {description.strip()}.\n"
        + f"Measured object width: {fmt_num(width_mm)} mm.\n"
    )


def format_physobjects_qa(
    obj1: tuple[str, str], obj2: tuple[str, str], concept: str, answer_index: int
) -> tuple[str, str]:
    """Pairwise relative question and answer for one physical concept."""
    if concept not in CONCEPTS:
        raise ValueError(f"unknown concept {concept!r}")
    if answer_index not in (1, 2):
        raise ValueError("answer_index must be 1 or 2")
    for material, name in (obj1, obj2):
        if not name.strip():
            raise ValueError("object names must be non-empty")
    phrase = CONCEPTS[concept]
    a = " ".join(p for p in obj1 if p).strip()
    b = " ".join(p for p in obj2 if p).strip()
    pick = a if answer_index == 1 else b
    return f"Which {phrase}, {a} or {b}?", f"A {pick} {phrase}."

"""Parser and formatter for the bullet-form grasp descriptor."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

START = "[start of description]"
END = "[end of description]"


class DescriptorError(ValueError):
    pass


class NoDelimiters(DescriptorError):
    pass


class MissingField(DescriptorError):
    def __init__(self, name: str):
        super().__init__(f"missing field: {name}")
        self.name = name


class DuplicateField(DescriptorError):
    def __init__(self, name: str):
        super().__init__(f"duplicate field: {name}")
        self.name = name


class MalformedNumber(DescriptorError):
    def __init__(self, field: str, token: str):
        super().__init__(f"{field}: expected a positive number, got {token!r}")
        self.field = field
        self.token = token


class UnknownChoice(DescriptorError):
    def __init__(self, field: str, token: str):
        super().__init__(f"{field}: unknown choice {token!r}")
        self.field = field
        self.token = token


class UnrecognizedBullet(DescriptorError):
    def __init__(self, line: str):
        super().__init__(f"unrecognized bullet: {line!r}")
        self.line = line


class InconsistentCoT(DescriptorError):
    pass


@dataclass(frozen=True)
class Deviation:
    direction: str  # "lower" / "higher"
    reason: str


@dataclass(frozen=True)
class CoTBlock:
    lighter_example: tuple[str, float]
    heavier_example: tuple[str, float]
    typical_mass_g: float
    object_note: str
    adjusted_relation: str
    adjusted_mass_g: float


@dataclass(frozen=True)
class DescriptorDoc:
    is_new_grasp: bool
    grasp_description: str
    complete: bool
    multiple_grasps: bool
    weight_class: str | None
    mass_g: float
    compliance_class: str
    k_npm: float
    mu: float
    goal_aperture_mm: float
    additional_closure_mm: float
    additional_force_n: float
    deviation: Deviation | None = None
    cot: CoTBlock | None = None


LEVELS = ("high", "medium", "low")

_N = r"(?P<n>\S+?)"
_PATTERNS: list[tuple[str, re.Pattern]] = [
    (name, re.compile(p + r"\.?\s*"))
    for name, p in [
        ("new_grasp", r"This (?P<c>.+?) a new grasp"),
        ("grasp_description", r"In accordance with the user instruction, this grasp should be (?P<s>.+?)"),
        ("complete", r"This is an? (?P<c>.+?) grasp"),
        ("multiple_grasps", r"This grasp (?P<c>.+?) contain multiple grasps"),
        ("weight_class", r"This grasp is for an object with (?P<c>.+?) weight"),
        ("mass", r"The object has an approximate mass of " + _N + " grams"),
        ("compliance_class", r"This grasp is for an object with (?P<c>.+?) compliance"),
        ("spring_constant", r"The object has an approximate spring constant of " + _N + " Newtons per meter"),
        ("friction", r"The gripper and object have an approximate friction coefficient of " + _N),
        ("goal_aperture", r"This grasp should set the goal aperture to " + _N + " mm"),
        ("additional_closure", r"If the gripper slips, this grasp should close an additional " + _N + " mm"),
        ("additional_force", r"If the gripper slips, this grasp should increase the output force by " + _N + " Newtons"),
        ("deviation", r"(?:\[optional\] )?Because of (?P<s>.+?), this grasp sets the force to be (?P<c>.+?) than the default minimum grasp force"),
        ("cot_comparison", r"This object has more mass than (?P<a>.+?), with mass of (?P<n1>\S+) g, and less mass than (?P<b>.+?), with mass of (?P<n2>\S+?) g"),
        ("cot_typical", r"Typically, this object's mass is approximately " + _N + " g, which is between these two masses"),
        ("cot_adjusted", r"Because the user specified that (?P<s>.+?), compared to typical, this object has a (?P<c>.+?) mass of " + _N + " grams"),
    ]
]

_COMMON = [
    "new_grasp", "grasp_description", "complete", "multiple_grasps",
    "compliance_class", "spring_constant", "friction", "goal_aperture",
    "additional_closure", "additional_force",
]
BASE_FIELDS = _COMMON[:4] + ["weight_class", "mass"] + _COMMON[4:]
COT_FIELDS = _COMMON[:4] + ["cot_comparison", "cot_typical", "cot_adjusted"] + _COMMON[4:]
_COT_ONLY = ("cot_comparison", "cot_typical", "cot_adjusted")


def _pnum(field: str, token: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise MalformedNumber(field, token) from None
    if not math.isfinite(v) or v <= 0:
        raise MalformedNumber(field, token)
    return v


def _choice(field: str, token: str, options) -> str:
    t = token.strip().lower()
    if t not in options:
        raise UnknownChoice(field, token)
    return t


def _body(text: str) -> list[str]:
    i = text.find(START)
    j = text.find(END, i + len(START)) if i >= 0 else -1
    if i < 0 or j < 0:
        raise NoDelimiters("descriptor must be wrapped in description delimiters")
    lines = []
    for raw in text[i + len(START):j].splitlines():
        line = raw.strip()
        if not line:
            continue
        if not line.startswith("*"):
            raise UnrecognizedBullet(line)
        lines.append(line.lstrip("*").strip())
    return lines


def parse_descriptor(text: str) -> DescriptorDoc:
    found: dict[str, re.Match] = {}
    for line in _body(text):
        for name, pat in _PATTERNS:
            m = pat.fullmatch(line)
            if m:
                break
        else:
            raise UnrecognizedBullet(line)
        if name in found:
            raise DuplicateField(name)
        found[name] = m

    is_cot = any(f in found for f in _COT_ONLY)
    for f in COT_FIELDS if is_cot else BASE_FIELDS:
        if f not in found:
            raise MissingField(f)

    g = {k: v.groupdict() for k, v in found.items()}
    new = _choice("new_grasp", g["new_grasp"]["c"], ("is", "is not")) == "is"
    complete = _choice("complete", g["complete"]["c"], ("complete", "incomplete")) == "complete"
    multiple = _choice("multiple_grasps", g["multiple_grasps"]["c"], ("does", "does not")) == "does"
    weight = (
        _choice("weight_class", g["weight_class"]["c"], LEVELS) if "weight_class" in g else None
    )
    compliance = _choice("compliance_class", g["compliance_class"]["c"], LEVELS)
    nums = {
        f: _pnum(f, g[f]["n"])
        for f in ("spring_constant", "friction", "goal_aperture", "additional_closure", "additional_force")
    }
    if nums["friction"] > 1:
        raise MalformedNumber("friction", g["friction"]["n"])

    deviation = None
    if "deviation" in g:
        d = g["deviation"]
        deviation = Deviation(_choice("deviation", d["c"], ("lower", "higher")), d["s"].strip())

    cot = None
    if is_cot:
        c, t, a = g["cot_comparison"], g["cot_typical"], g["cot_adjusted"]
        lo = _pnum("cot_comparison", c["n1"])
        hi = _pnum("cot_comparison", c["n2"])
        typical = _pnum("cot_typical", t["n"])
        if not lo < hi:
            raise InconsistentCoT(f"lighter example ({lo} g) is not lighter than heavier ({hi} g)")
        if not lo <= typical <= hi:
            raise InconsistentCoT(f"typical mass {typical} g outside [{lo}, {hi}] g")
        cot = CoTBlock(
            lighter_example=(c["a"].strip(), lo),
            heavier_example=(c["b"].strip(), hi),
            typical_mass_g=typical,
            object_note=a["s"].strip(),
            adjusted_relation=_choice("cot_adjusted", a["c"], ("greater", "lesser", "similar")),
            adjusted_mass_g=_pnum("cot_adjusted", a["n"]),
        )
    mass = _pnum("mass", g["mass"]["n"]) if "mass" in g else cot.adjusted_mass_g

    return DescriptorDoc(
        is_new_grasp=new,
        grasp_description=g["grasp_description"]["s"].strip(),
        complete=complete,
        multiple_grasps=multiple,
        weight_class=weight,
        mass_g=mass,
        compliance_class=compliance,
        k_npm=nums["spring_constant"],
        mu=nums["friction"],
        goal_aperture_mm=nums["goal_aperture"],
        additional_closure_mm=nums["additional_closure"],
        additional_force_n=nums["additional_force"],
        deviation=deviation,
        cot=cot,
    )


def fmt_num(v: float) -> str:
    """Shortest text that parses back to exactly ``v``."""
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def format_descriptor(doc: DescriptorDoc) -> str:
    lines = [
        f"This {'is' if doc.is_new_grasp else 'is not'} a new grasp.",
        f"In accordance with the user instruction, this grasp should be {doc.grasp_description}.",
        f"This is a{'' if doc.complete else 'n'} {'complete' if doc.complete else 'incomplete'} grasp.",
        f"This grasp {'does' if doc.multiple_grasps else 'does not'} contain multiple grasps.",
    ]
    if doc.cot is not None:
        c = doc.cot
        lines += [
            f"This object has more mass than {c.lighter_example[0]}, with mass of "
            f"{fmt_num(c.lighter_example[1])} g, and less mass than {c.heavier_example[0]}, "
            f"with mass of {fmt_num(c.heavier_example[1])} g",
            f"Typically, this object's mass is approximately {fmt_num(c.typical_mass_g)} g, "
            "which is between these two masses.",
            f"Because the user specified that {c.object_note}, compared to typical, this object "
            f"has a {c.adjusted_relation} mass of {fmt_num(c.adjusted_mass_g)} grams.",
        ]
    else:
        lines += [
            f"This grasp is for an object with {doc.weight_class} weight.",
            f"The object has an approximate mass of {fmt_num(doc.mass_g)} grams",
        ]
    lines += [
        f"This grasp is for an object with {doc.compliance_class} compliance.",
        f"The object has an approximate spring constant of {fmt_num(doc.k_npm)} Newtons per meter.",
        f"The gripper and object have an approximate friction coefficient of {fmt_num(doc.mu)}",
        f"This grasp should set the goal aperture to {fmt_num(doc.goal_aperture_mm)} mm.",
        f"If the gripper slips, this grasp should close an additional {fmt_num(doc.additional_closure_mm)} mm.",
        f"If the gripper slips, this grasp should increase the output force by {fmt_num(doc.additional_force_n)} Newtons.",
    ]
    if doc.deviation is not None:
        lines.append(
            f"Because of {doc.deviation.reason}, this grasp sets the force to be "
            f"{doc.deviation.direction} than the default minimum grasp force."
        )
    return START + "\n" + "".join(f"* {line}\n" for line in lines) + END + "\n"

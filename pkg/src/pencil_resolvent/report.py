"""Pass/fail checks and report rendering."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Check:
    """A named quantity compared against an upper bound."""

    name: str
    value: float
    bound: float
    passed: bool | None = None

    def __post_init__(self):
        self.value = float(self.value)
        if self.passed is None:
            self.passed = bool(self.value <= self.bound)

    def as_dict(self) -> dict:
        return {"name": self.name, "value": _num(self.value), "bound": _num(self.bound),
                "passed": self.passed}


def _num(x):
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return str(x)
    return x


@dataclass
class Report:
    """Everything a CLI command produces."""

    command: str
    settings: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "settings": self.settings,
            **{k: to_jsonable(v) for k, v in self.sections.items()},
            "checks": [c.as_dict() for c in self.checks],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False)

    def to_text(self) -> str:
        lines = [f"command: {self.command}", "settings:"]
        for k, v in self.settings.items():
            lines.append(f"  {k}: {to_jsonable(v)}")
        for name, value in self.sections.items():
            lines.append(f"{name}:")
            lines.extend(_text_block(to_jsonable(value), "  "))
        if self.checks:
            lines.append("checks:")
            width = max(len(c.name) for c in self.checks)
            for c in self.checks:
                flag = "PASS" if c.passed else "FAIL"
                lines.append(f"  [{flag}] {c.name:<{width}}  {c.value:.3e} <= {c.bound:.1e}")
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _text_block(value, indent: str) -> list[str]:
    if isinstance(value, dict):
        out = []
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                out.append(f"{indent}{k}:")
                out.extend(_text_block(v, indent + "  "))
            else:
                out.append(f"{indent}{k}: {v}")
        return out
    if isinstance(value, list):
        return [f"{indent}- {v}" for v in value]
    return [f"{indent}{value}"]


def _is_flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or _is_flat(x) for x in v) and \
            not any(isinstance(x, dict) for x in v)
    return False


def to_jsonable(value):
    """Convert arrays and complex numbers to JSON-compatible structures.

    Complex scalars become ``[re, im]`` pairs.
    """
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float):
        return _num(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value

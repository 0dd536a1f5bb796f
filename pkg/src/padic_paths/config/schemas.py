"""Pydantic schemas for verification reports and evaluation results."""

from dataclasses import asdict, is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional

import orjson
from pydantic import BaseModel, Field

from ..propagator.padic_core import ExactCircle, Place


class CheckStatus(str, Enum):
    """Outcome of a single verification check."""
    PASS = "pass"
    FAIL = "fail"


class VerificationReport(BaseModel):
    """One verification check; both sides of the comparison are always kept."""
    check: str = Field(..., description="Check identifier, e.g. group/free/p=3")
    inputs: Dict[str, Any] = Field(default_factory=dict, description="Parameters the check ran with")
    expected: Any = Field(..., description="Reference side of the comparison")
    got: Any = Field(..., description="Computed side of the comparison")
    tol: Optional[float] = Field(None, description="Float tolerance, absent for exact checks")
    status: CheckStatus = Field(..., description="pass or fail")

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS


class EvalResult(BaseModel):
    """Result of an evaluator subcommand."""
    command: str = Field(..., description="Subcommand name")
    inputs: Dict[str, Any] = Field(default_factory=dict)
    result: Any = Field(..., description="Exact result with float rendering where applicable")


def circle_payload(z: ExactCircle) -> Dict[str, Any]:
    """Exact fields of a circle value plus its float rendering."""
    return {"mag2": z.mag2, "phase": z.phase, "value": complex(z)}


def _default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, ExactCircle):
        return circle_payload(obj)
    if isinstance(obj, Place):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if is_dataclass(obj):
        return asdict(obj)
    if isinstance(obj, (tuple, set, frozenset)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _normalize(obj: Any) -> Any:
    """Rewrite values orjson would serialize natively but not as wanted."""
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, ExactCircle):
        return _normalize(circle_payload(obj))
    if isinstance(obj, Place):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, float) and obj in (float("inf"), float("-inf")):
        return "inf" if obj > 0 else "-inf"
    return obj


def dumps(model: BaseModel) -> bytes:
    """One sorted-key JSON line for a report or result."""
    payload = _normalize({name: getattr(model, name) for name in type(model).model_fields})
    return orjson.dumps(payload, default=_default, option=orjson.OPT_SORT_KEYS | orjson.OPT_APPEND_NEWLINE)


def render_table_row(model: BaseModel) -> str:
    """Fixed-column text rendering of a report or result."""
    fields = orjson.loads(dumps(model))
    if isinstance(model, VerificationReport):
        return f"{fields['status']:<5} {fields['check']:<40} expected={orjson.dumps(fields['expected']).decode()} got={orjson.dumps(fields['got']).decode()}\n"
    return f"{fields['command']:<8} {orjson.dumps(fields['result'], option=orjson.OPT_SORT_KEYS).decode()}\n"

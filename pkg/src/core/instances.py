"""
Instance files: validated description of one geometry to analyze

An instance file is a JSON document with the top-level keys kind, payload
and arithmetic. Numbers may be given as ints, floats, decimal strings or
rational strings such as "3/4"; all of them are kept as strings until the
arithmetic mode is known, so "0.1" becomes 1/10 in exact mode.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..utils.logger import get_logger
from .errors import ParseError
from .lie_groups import FamilyParams, LieAlgebra3
from .metric_jets import CirculantJet
from .tensor3 import DIM, ArithmeticMode, as_array, to_scalar


log = get_logger("Instances")

Number = Union[int, float, str]


def _rational_text(value: Any) -> str:
    """Canonical text of a number; rejects anything Fraction cannot parse"""
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = repr(float(value))
    elif isinstance(value, str):
        text = value.strip()
    else:
        raise ValueError(f"expected a number, got {type(value).__name__}")
    try:
        Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{value!r} is not a rational number") from exc
    return text


def _vector(values: List[Any], length: int = DIM) -> List[str]:
    if len(values) != length:
        raise ValueError(f"expected {length} entries, got {len(values)}")
    return [_rational_text(v) for v in values]


def _matrix(rows: List[List[Any]]) -> List[List[str]]:
    if len(rows) != DIM:
        raise ValueError(f"expected {DIM} rows, got {len(rows)}")
    return [_vector(row) for row in rows]


class CirculantJetPayload(BaseModel):
    """2-jet of a circulant metric; omitted derivatives are zero"""

    model_config = ConfigDict(extra="forbid")

    A: Number
    B: Number
    dA: List[Number] = Field(default_factory=lambda: ["0"] * DIM)
    dB: List[Number] = Field(default_factory=lambda: ["0"] * DIM)
    d2A: List[List[Number]] = Field(default_factory=lambda: [["0"] * DIM for _ in range(DIM)])
    d2B: List[List[Number]] = Field(default_factory=lambda: [["0"] * DIM for _ in range(DIM)])

    @field_validator("A", "B", mode="before")
    @classmethod
    def _scalar(cls, value):
        return _rational_text(value)

    @field_validator("dA", "dB", mode="before")
    @classmethod
    def _gradient(cls, value):
        return _vector(list(value))

    @field_validator("d2A", "d2B", mode="before")
    @classmethod
    def _hessian(cls, value):
        return _matrix([list(row) for row in value])

    def build(self, mode: ArithmeticMode) -> CirculantJet:
        return CirculantJet(
            A=to_scalar(self.A, mode),
            B=to_scalar(self.B, mode),
            dA=as_array(self.dA, mode),
            dB=as_array(self.dB, mode),
            d2A=as_array(self.d2A, mode),
            d2B=as_array(self.d2B, mode),
        )


class LieFamilyPayload(BaseModel):
    """One of the two bracket families with its parameters"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    family: Literal[1, 2]
    lambdas: List[Number] = Field(alias="lambda")

    @field_validator("lambdas", mode="before")
    @classmethod
    def _parameters(cls, value):
        return [_rational_text(v) for v in value]

    @model_validator(mode="after")
    def _arity(self):
        arity = {1: 3, 2: 2}[self.family]
        if len(self.lambdas) != arity:
            raise ValueError(f"family {self.family} takes {arity} parameters, got {len(self.lambdas)}")
        return self

    def params(self) -> FamilyParams:
        return FamilyParams(family=self.family, lambdas=tuple(self.lambdas))

    def build(self, mode: ArithmeticMode) -> LieAlgebra3:
        return self.params().algebra(mode)


class LieCustomPayload(BaseModel):
    """
    Lie algebra by the brackets of basis pairs

    brackets maps "12", "13", "23" to the coefficients of [x_i, x_j] in
    the basis {x1, x2, x3}; missing pairs commute.
    """

    model_config = ConfigDict(extra="forbid")

    brackets: Dict[Literal["12", "13", "23"], List[Number]]
    name: str = "custom"

    @field_validator("brackets", mode="before")
    @classmethod
    def _coefficients(cls, value):
        if not isinstance(value, dict):
            raise ValueError("brackets must be an object keyed by '12', '13', '23'")
        return {key: _vector(list(coefficients)) for key, coefficients in value.items()}

    def build(self, mode: ArithmeticMode) -> LieAlgebra3:
        brackets = {(int(key[0]), int(key[1])): values for key, values in self.brackets.items()}
        return LieAlgebra3.from_brackets(brackets, mode=mode, name=self.name)


_PAYLOADS = {
    "circulant-jet": CirculantJetPayload,
    "lie-family": LieFamilyPayload,
    "lie-custom": LieCustomPayload,
}


class InstanceSpec(BaseModel):
    """Top-level instance document"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["circulant-jet", "lie-family", "lie-custom"]
    payload: Union[CirculantJetPayload, LieFamilyPayload, LieCustomPayload]
    arithmetic: Literal["exact", "float"] = "exact"

    @model_validator(mode="before")
    @classmethod
    def _payload_for_kind(cls, data):
        if isinstance(data, dict) and isinstance(data.get("payload"), dict):
            model = _PAYLOADS.get(data.get("kind"))
            if model is not None:
                data = dict(data)
                try:
                    data["payload"] = model.model_validate(data["payload"])
                except ValidationError as exc:
                    raise ValueError(f"payload of a {data['kind']} instance: {_describe(exc)}") from exc
        return data

    @property
    def mode(self) -> ArithmeticMode:
        return ArithmeticMode(self.arithmetic)

    def with_arithmetic(self, arithmetic: Optional[str]) -> "InstanceSpec":
        if arithmetic is None or arithmetic == self.arithmetic:
            return self
        return self.model_copy(update={"arithmetic": arithmetic})

    def build(self) -> Union[CirculantJet, LieAlgebra3]:
        """Geometric object of the instance in its arithmetic mode"""
        return self.payload.build(self.mode)

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


def _describe(exc: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(p) for p in error['loc']) or '<root>'}: {error['msg']}" for error in exc.errors()
    )


def parse_instance(data: Any) -> InstanceSpec:
    """
    Validate an already decoded instance document

    Raises:
        ParseError: document does not describe a valid instance
    """
    try:
        return InstanceSpec.model_validate(data)
    except ValidationError as exc:
        raise ParseError(f"Invalid instance: {_describe(exc)}") from exc


def load_instance(path: Union[str, Path]) -> InstanceSpec:
    """
    Read and validate an instance file

    Args:
        path: JSON instance file

    Returns:
        Validated instance

    Raises:
        ParseError: file missing, not JSON, or not a valid instance
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError as exc:
        raise ParseError(f"Instance file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    spec = parse_instance(data)
    log.debug(f"Loaded {spec.kind} instance from {path} ({spec.arithmetic})")
    return spec

"""Pydantic schemas for group files, cover configurations and certificates."""
from __future__ import annotations
from typing import Any, Literal, Optional
from fractions import Fraction
from pydantic import BaseModel, Field, field_validator, model_validator


def _check_rational(value: str) -> str:
    try:
        Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {value!r}") from exc
    return str(value).strip()


RationalColumn = list[str]
# ── Group files ───────────────────────────────────────────────────────────────
class GeneratorSpec(BaseModel):
    vector: list[str]
    inverted_primes: list[int] = []

    @field_validator("vector", mode="before")
    @classmethod
    def _rationals(cls, value):
        return [_check_rational(v) for v in value]
class LocalDataSpec(BaseModel):
    prime: int
    divisible_basis: list[RationalColumn] = []  # columns
    lattice_basis: list[RationalColumn] = []  # columns

    @field_validator("divisible_basis", "lattice_basis", mode="before")
    @classmethod
    def _rationals(cls, value):
        return [[_check_rational(v) for v in col] for col in value]
class LocalFormSpec(BaseModel):
    span_basis: list[RationalColumn] = []
    base_lattice: list[RationalColumn] = []
    locals: list[LocalDataSpec] = []

    @field_validator("span_basis", "base_lattice", mode="before")
    @classmethod
    def _rationals(cls, value):
        return [[_check_rational(v) for v in col] for col in value]
class GroupFile(BaseModel):
    ambient_rank: int = Field(ge=0)
    generators: Optional[list[GeneratorSpec]] = None
    local_form: Optional[LocalFormSpec] = None

    @model_validator(mode="after")
    def _one_form(self):
        if (self.generators is None) == (self.local_form is None):
            raise ValueError("give exactly one of 'generators' or 'local_form'")
        return self
# ── Covers ────────────────────────────────────────────────────────────────────
class CoverConfig(BaseModel):
    q_l: int = 2
    q_k: int = 3
    q: int = 5
    l_rigidity_primes: list[int] = [7, 11, 13]
    k_rigidity_primes: list[int] = [17, 19, 23]
    kernel_rank: int = Field(1, ge=1)
    x_l: Optional[list[str]] = None  # defaults to e1 of L
    x_k: Optional[list[str]] = None  # defaults to e1 of K

    @field_validator("x_l", "x_k", mode="before")
    @classmethod
    def _rationals(cls, value):
        return None if value is None else [_check_rational(v) for v in value]
# ── Certificates ──────────────────────────────────────────────────────────────
class Condition(BaseModel):
    label: str
    status: Literal["pass", "fail", "info"]
    witness: Optional[dict[str, Any]] = None
class Certificate(BaseModel):
    subject: str
    verdict: Literal["pass", "fail"]
    conditions: list[Condition] = []
    attachments: dict[str, Certificate] = {}

    @classmethod
    def from_conditions(cls, subject: str, conditions: list[Condition],
                        attachments: Optional[dict[str, Certificate]] = None) -> Certificate:
        verdict = "fail" if any(c.status == "fail" for c in conditions) else "pass"
        return cls(subject=subject, verdict=verdict, conditions=conditions, attachments=attachments or {})

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def first_failure(self) -> Optional[Condition]:
        return next((c for c in self.conditions if c.status == "fail"), None)
# ── Oracle ────────────────────────────────────────────────────────────────────
class SearchBounds(BaseModel):
    max_numerator: int = Field(8, ge=0)
    max_exponent: int = Field(3, ge=0)
    primes: list[int] = []  # denominators allowed in hom entries
class CrossCheckReport(BaseModel):
    agree: bool
    primary_count: int
    oracle_count: int
    only_in_primary: list[Any] = []
    only_in_oracle: list[Any] = []
# ── CLI ───────────────────────────────────────────────────────────────────────
class CommandRequest(BaseModel):
    verb: str
    inputs: dict[str, str] = {}  # role -> file path
    options: dict[str, Any] = {}
    output: Literal["text", "json"] = "text"
    cross_check: bool = False
class CommandResult(BaseModel):
    verdict: Optional[bool] = None
    payload: dict[str, Any] = {}
    text: str = ""
    input_hashes: dict[str, str] = {}
Certificate.model_rebuild()

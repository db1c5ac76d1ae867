"""String codecs for rationals and matrices, plus stable input hashes."""
import hashlib
import json
from fractions import Fraction
from typing import Any, Iterable, Sequence

from cellcover.errors import InputError
from cellcover.utils.exactlin import RationalMatrix, RationalVector


def rational_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str, where: str = "") -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}malformed rational {text!r}") from exc


def vector_to_strings(v: Iterable[Fraction]) -> list[str]:
    return [rational_to_str(x) for x in v]


def parse_vector(text: str | Sequence[str], where: str = "") -> RationalVector:
    """Accepts ``"1/2,0,3"`` or a list of rational strings."""
    items = text.split(",") if isinstance(text, str) else list(text)
    if isinstance(text, str) and not text.strip():
        return ()
    return tuple(parse_rational(item, f"{where}entry {i}: ") for i, item in enumerate(items))


def parse_matrix_rows(text: str, where: str = "") -> RationalMatrix:
    """Rows separated by ``;``, entries by ``,``."""
    rows = [parse_vector(r, f"{where}row {i}: ") for i, r in enumerate(text.split(";")) if r.strip()]
    if len({len(r) for r in rows}) > 1:
        raise InputError(f"{where}rows have different lengths")
    return RationalMatrix.from_rows(rows)


def columns_to_strings(m: RationalMatrix) -> list[list[str]]:
    return [vector_to_strings(c) for c in m.columns()]


def rows_to_strings(m: RationalMatrix) -> list[list[str]]:
    return [vector_to_strings(r) for r in m.entries]


def parse_columns(columns: Sequence[Sequence[str]], rows: int, where: str = "") -> RationalMatrix:
    parsed = [parse_vector(c, f"{where}column {j} ") for j, c in enumerate(columns)]
    if any(len(c) != rows for c in parsed):
        raise InputError(f"{where}column length differs from the ambient rank {rows}")
    return RationalMatrix.from_columns(parsed, rows)


def digest(payload: Any) -> str:
    """sha256 over canonical JSON."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def parse_primes(text: str, where: str = "") -> list[int]:
    """Comma-separated integers; primality is checked by the callers."""
    out = []
    for item in (text or "").split(","):
        if not item.strip():
            continue
        try:
            out.append(int(item))
        except ValueError as exc:
            raise InputError(f"{where}malformed prime {item.strip()!r}") from exc
    return out

"""Typed exceptions raised by the toolkit; ``status`` doubles as the CLI exit code."""


class CellCoverError(Exception):
    status: int = 3

    def __init__(self, detail: str, status: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if status is not None:
            self.status = status


class InputError(CellCoverError):
    status = 2


class PurityError(CellCoverError):
    """The subgroup is not pure, so the quotient would have torsion."""
    status = 2


class NotFiniteTypeError(CellCoverError):
    """The result would need infinitely many exceptional primes (e.g. all of ℚⁿ)."""
    status = 2


class SurjectivityError(CellCoverError):
    status = 2


class CoverError(CellCoverError):
    status = 1


class ConstructionError(CellCoverError):
    status = 3

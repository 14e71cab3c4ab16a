"""Exception hierarchy shared by every priorlab module."""

from __future__ import annotations

from typing import Any


class PriorlabError(Exception):
    """Base class for all library errors."""


# numerics


class NonConvergence(PriorlabError):
    """Quadrature or summation exhausted its budget before meeting tolerance."""

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result = result


class NonIntegrable(NonConvergence):
    """A fitted endpoint power law shows the integral diverges."""


class NonFinite(PriorlabError):
    """An integrand returned NaN or an infinity at an interior node."""

    def __init__(self, message: str, node: float | None = None) -> None:
        super().__init__(message)
        self.node = node


class Inconclusive(PriorlabError):
    """Window integrals neither stabilized nor grew steadily."""


class NotBracketed(PriorlabError):
    """The requested probability is outside the cdf range on the interval."""


# density DSL


class DSLError(PriorlabError):
    """Base class for density-expression errors."""


class DSLSyntaxError(DSLError):
    def __init__(self, offset: int, expected: frozenset[str], found: str) -> None:
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        wanted = ", ".join(sorted(self.expected)) or "nothing"
        super().__init__(f"syntax error at byte {offset}: found {found}, expected one of: {wanted}")


class UnknownFunction(DSLError):
    def __init__(self, name: str, offset: int) -> None:
        self.name = name
        self.offset = offset
        super().__init__(f"unknown function {name!r} at byte {offset}")


class ArityMismatch(DSLError):
    def __init__(self, name: str, expected: int, got: int, offset: int) -> None:
        self.name = name
        self.expected = expected
        self.got = got
        self.offset = offset
        super().__init__(f"{name} takes {expected} argument(s), got {got} (byte {offset})")


class UnboundVariable(DSLError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class DomainError(DSLError):
    def __init__(self, function: str, argument: Any) -> None:
        self.function = function
        self.argument = argument
        super().__init__(f"{function} is undefined at {argument!r}")


# measures


class MeasureError(PriorlabError):
    """Base class for invalid measure constructions and operations."""


class NonPositiveScalar(MeasureError):
    pass


class AllProbesNull(MeasureError):
    pass


class EmptyRestriction(MeasureError):
    pass


class ZeroResult(MeasureError):
    pass


class DomainMismatch(MeasureError):
    pass


# families


class FamilyError(PriorlabError):
    pass


class ZeroAtOrigin(FamilyError):
    pass


class ZeroAtOne(FamilyError):
    pass


class NonFiniteDensity(FamilyError):
    pass


# convergence


class ConvergenceError(PriorlabError):
    pass


class NullProbe(ConvergenceError):
    pass


class MissingScalingHint(ConvergenceError):
    pass


class ImproperMember(ConvergenceError):
    pass


class MedianDrift(ConvergenceError):
    pass


class PreconditionFailure(ConvergenceError):
    pass


# posterior


class ZeroEvidence(PriorlabError):
    pass


class NotTight(PriorlabError):
    """Tightness search failed; ``report`` holds the q-vague evidence gathered so far."""

    def __init__(self, message: str, report: object = None) -> None:
        super().__init__(message)
        self.report = report


# configuration


class ConfigError(PriorlabError):
    """A configuration file failed to load or validate."""

    def __init__(self, message: str, path: str | None = None, offset: int | None = None) -> None:
        self.path = path
        self.offset = offset
        where = path or "<input>"
        if offset is not None:
            where = f"{where}:{offset}"
        super().__init__(f"{where}: {message}")


class UnknownExample(PriorlabError):
    pass

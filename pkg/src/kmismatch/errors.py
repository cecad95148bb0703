"""Exception types and the diagnostic record shared by all frontends."""

from __future__ import annotations

from dataclasses import dataclass, field


class KmismatchError(Exception):
    """Base class for all errors raised by this package."""


class UnboundAtomError(KmismatchError, KeyError):
    def __init__(self, atom: str):
        super().__init__(atom)
        self.atom = atom

    def __str__(self) -> str:
        return f"atom {self.atom!r} is not bound in the assignment"


class FormulaSyntaxError(KmismatchError, ValueError):
    pass


class ResourceLimitError(KmismatchError):
    """A solver query ran out of its conflict or time budget."""


class EnumerationExplosionError(KmismatchError):
    """Model enumeration was asked to project onto too many atoms."""

    def __init__(self, size: int, cap: int):
        super().__init__(f"projection over {size} atoms exceeds the cap of {cap}")
        self.size = size
        self.cap = cap


class KconfigError(KmismatchError):
    def __init__(self, message: str, file: str | None = None, line: int | None = None):
        where = ""
        if file is not None:
            where = f"{file}:{line}: " if line is not None else f"{file}: "
        super().__init__(where + message)
        self.file = file
        self.line = line


class KconfigSyntaxError(KconfigError):
    pass


class UnknownOptionError(KmismatchError, KeyError):
    def __str__(self) -> str:
        return f"unknown option {self.args[0]!r}"


class DescentCycleError(KmismatchError):
    def __init__(self, cycle: list[str]):
        super().__init__("subdirectory descent cycle: " + " -> ".join(cycle))
        self.cycle = cycle


class UnbalancedDirectiveError(KmismatchError):
    def __init__(self, message: str, file: str, line: int):
        super().__init__(f"{file}:{line}: {message}")
        self.file = file
        self.line = line


class EmptyPresenceConditionsError(KmismatchError):
    """A feature effect was requested for an atom that no presence condition uses."""


class OracleLimitError(KmismatchError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal finding from one of the frontends.

    ``symbols`` lists the bare variable names the finding concerns, so that
    callers can route them into exclusion sets.
    """

    source: str
    kind: str
    message: str
    file: str | None = None
    line: int | None = None
    symbols: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "kind": self.kind,
            "message": self.message,
            "file": self.file,
            "line": self.line,
            "symbols": list(self.symbols),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Diagnostic":
        return cls(d["source"], d["kind"], d["message"], d.get("file"), d.get("line"),
                   tuple(d.get("symbols", ())))

    def __str__(self) -> str:
        loc = ""
        if self.file:
            loc = f"{self.file}:{self.line}: " if self.line else f"{self.file}: "
        return f"{loc}[{self.source}/{self.kind}] {self.message}"

"""Exception types raised across the package."""


class LensLabError(Exception):
    """Base class for all errors raised by lenslab."""


class InvalidLens(LensLabError, ValueError):
    """A lens table violates its declared carriers."""


class CarrierMismatch(LensLabError, ValueError):
    """A law or binding does not fit the lens it is applied to."""


class BudgetExceeded(LensLabError):
    """An exhaustive search would visit more lenses than allowed."""

    def __init__(self, message: str, searched: list[tuple[int, int]] | None = None):
        super().__init__(message)
        self.searched = searched or []


class UnknownEntry(LensLabError, KeyError):
    """No gallery entry has the requested name."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown gallery entry"


class WindowTooSmall(LensLabError):
    """A claimed failure produced no witness within the integer window."""

"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class LommelError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(LommelError, ValueError):
    """Parameters are outside the domain of an operation."""


class HypothesisViolation(LommelError, ValueError):
    """A sector or order hypothesis of a remainder bound or representation fails.

    ``inequality`` names the violated condition so callers (and the CLI) can
    report it verbatim.
    """

    def __init__(self, inequality: str, detail: str = "") -> None:
        self.inequality = inequality
        msg = f"hypothesis violated: {inequality}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class PoleError(ParameterError):
    """A Gamma function or coefficient hits a pole."""


class DegenerateBoundError(LommelError):
    """A bound is refused because its closed form degenerates at these parameters."""


class CancellationError(LommelError):
    """Required intermediate precision exceeds the configured cap."""


class QuadratureError(LommelError):
    """Quadrature did not reach the requested accuracy."""


class QuadratureCancelled(LommelError):
    """Quadrature was interrupted through its cancellation token."""

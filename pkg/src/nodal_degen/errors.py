"""Exception types shared across the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all toolkit-specific errors."""


class ArityError(ToolkitError, ValueError):
    """Operands disagree on the number of variables, or an index is out of range."""


class PointNotOnSurface(ToolkitError, ValueError):
    """A point claimed to lie on a surface does not satisfy its equation."""


class GluingError(ToolkitError, ValueError):
    """The two chart equations of a central fibre do not cut the same curve on R."""


class GenericityError(ToolkitError, RuntimeError):
    """A seeded draw failed its genericity certificate after exhausting retries."""


class DataFormatError(ToolkitError, ValueError):
    """An interchange file does not match its documented schema."""

"""
Exception hierarchy for beamlink.

Library code raises these; only the CLI turns them into exit codes.
"""

from __future__ import annotations

from typing import Optional

import numpy as np


class BeamlinkError(Exception):
    """Base class for every error raised by beamlink."""


class InvalidArgumentError(BeamlinkError, ValueError):
    """A numeric argument is out of its admissible range."""


class GeometryError(BeamlinkError):
    """Inverted or degenerate element, face or beam segment."""


class ConfigurationError(BeamlinkError):
    """A scenario or model is inconsistent. ``key`` names the offending config entry."""

    def __init__(self, message: str, *, key: Optional[str] = None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class RankDeficiencyError(ConfigurationError):
    """The constraint block B lost rank."""

    def __init__(self, message: str, *, row_space: np.ndarray, rank: int):
        super().__init__(message, key="interface")
        self.row_space = row_space
        self.rank = rank


class UnsupportedConfigurationError(BeamlinkError):
    """The requested operation is not defined for this configuration."""


class WellPosednessError(BeamlinkError):
    """The saddle-point matrix is singular."""

    def __init__(self, message: str, *, zero_pivots: int):
        super().__init__(message)
        self.zero_pivots = zero_pivots


class ExportError(BeamlinkError):
    """Writing or reading an artifact failed."""

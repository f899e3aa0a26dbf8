"""Deposition laboratory: exact kernels, stochastic engines, couplings and
experiment harness for columnar growth models."""

from .core import (
    Configuration,
    HeightOccupation,
    MassMismatchError,
    OrderedView,
    effective_ground,
    height_occupation,
    in_early_regime,
    monopolistic_ge,
    ordered_view,
)
from .engines import GrowthModel, RngStream, run_trajectory
from .kernels import (
    AbsorptionProfile,
    AttachmentLaw,
    RecursionTrace,
    absorption_profile,
    ballistic_attachment_law,
    diffusive_attachment_law,
    ground_probability_recursion,
)

__version__ = "0.1.0"

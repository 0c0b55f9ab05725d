"""Shock-fronted travelling waves of reaction-diffusion equations with forward-backward diffusion."""

from .model import ModelSpec, ReactionClass
from .phase_plane import Regularisation

__version__ = "0.1.0"

__all__ = ["ModelSpec", "ReactionClass", "Regularisation", "__version__"]

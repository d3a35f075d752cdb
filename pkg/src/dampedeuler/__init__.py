"""Damped compressible Euler: lifespan sweeps, vector-field diagnostics and
verification of the identities and inequalities behind the energy method."""
from .model import EquationParams, InitialDataSpec, Mesh, SoundState, PrimitiveState

__version__ = "0.1.0"
__all__ = ["EquationParams", "InitialDataSpec", "Mesh", "SoundState", "PrimitiveState"]

"""Weighted vector-field energies and solution monitors."""
from .energies import (CSV_COLUMNS, EnergyReport, dissipation_G, dissipation_series, embed_radial,
                       energy_E, energy_aux, energy_history, energy_report, monitors,
                       write_energy_csv, z_theta_sq)
from .vector_fields import VectorFieldOp, apply_vector_field, multi_indices, sound_jets

__all__ = ["CSV_COLUMNS", "EnergyReport", "dissipation_G", "dissipation_series", "embed_radial",
           "energy_E", "energy_aux", "energy_history", "energy_report", "monitors",
           "write_energy_csv", "z_theta_sq", "VectorFieldOp", "apply_vector_field",
           "multi_indices", "sound_jets"]

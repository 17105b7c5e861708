"""Model checking ATL+ over concurrent game models through evaluation games."""
from .formula import parse_formula, expand_abbreviations, fragment_width, relative_atoms, to_text
from .cgm import Cgm, ModelError, load_model, mstar, m3, hub
from .checker import model_check, cross_validate, random_instance
from .strategy import witness

__all__ = ["parse_formula", "expand_abbreviations", "fragment_width", "relative_atoms",
           "to_text", "Cgm", "ModelError", "load_model", "mstar", "m3", "hub", "model_check",
           "cross_validate", "random_instance", "witness"]

__version__ = "0.1.0"

"""Binary forms failing the integral Hasse principle: descent, local solubility, and certified constructions."""

__version__ = "0.1.0"

from .forms import BinaryForm, IntegerSubstitution, act, discriminant, is_maximal  # noqa: E402

__all__ = ["BinaryForm", "IntegerSubstitution", "act", "discriminant", "is_maximal", "__version__"]

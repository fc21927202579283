"""Speaker/listener gender annotation, routing and evaluation for English-Arabic MT data."""

from .labels import ALL_LABELS, Gender, GenderLabel, Role

__all__ = ["ALL_LABELS", "Gender", "GenderLabel", "Role"]
__version__ = "0.1.0"

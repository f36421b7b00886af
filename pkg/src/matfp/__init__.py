"""Material model discovery by fingerprint matching.

Simulate standardized experiments for a zoo of hyperelastic models, store the
normalized responses in a database, and identify the model behind a new
measurement by cosine-similarity search followed by parameter rescaling.
"""

from .errors import MatFPError
from .models import Family, MaterialModel, Regime, piola_stress, ss_stress, strain_energy, ut_stress
from .database import FingerprintDatabase, normalize
from .matcher import MatchResult, match, rescale
from .metrics import e_compr, e_incompr
from .noise import NoiseSpec, add_noise

__version__ = "0.1.0"

__all__ = [
    "Family",
    "FingerprintDatabase",
    "MatFPError",
    "MatchResult",
    "MaterialModel",
    "NoiseSpec",
    "Regime",
    "add_noise",
    "e_compr",
    "e_incompr",
    "match",
    "normalize",
    "piola_stress",
    "rescale",
    "ss_stress",
    "strain_energy",
    "ut_stress",
]

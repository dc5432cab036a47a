"""Exact and asymptotic analysis of det(B + e^{i theta} I) for the L x L Pascal matrix B."""

__version__ = "0.1.0"

from .mpnum import PrecisionContext  # noqa: E402
from .exact_core import ThetaValue, char_poly, eval_D, eval_D_derivatives  # noqa: E402
from .special_products import (asm_count, htsasm_count, loop_probabilities,  # noqa: E402
                               phi_exact)
from .asymptotics import (AsymptoticParams, D_asym, amplitude_A0, phi_asym,  # noqa: E402
                          special_series)

__all__ = [
    "__version__",
    "PrecisionContext",
    "ThetaValue",
    "char_poly",
    "eval_D",
    "eval_D_derivatives",
    "asm_count",
    "htsasm_count",
    "loop_probabilities",
    "phi_exact",
    "AsymptoticParams",
    "D_asym",
    "amplitude_A0",
    "phi_asym",
    "special_series",
]

"""Truncated series, local involutions and foliation germs, with rational-family tools."""

from .baire_path import gt_path, gt_path_derivative, path_report
from .errors import DomainError, FoliumError, NumericalError, TruncationOverflow
from .foliation import (OneForm, TangencyDatum, blow_up, first_integral, involution_of, is_T1,
                        model_from_beta, tangencies)
from .involutions import (Involution, Moebius, check_involution, g_orbit_equivalent,
                          involution_from_conjugator, involution_from_level, moebius_conjugate)
from .series import Series1, Series2, comp_inverse, compose, norm_d, norm_l1, rescale

__version__ = "0.1.0"

__all__ = [
    "DomainError", "FoliumError", "Involution", "Moebius", "NumericalError", "OneForm", "Series1",
    "Series2", "TangencyDatum", "TruncationOverflow", "blow_up", "check_involution", "comp_inverse",
    "compose", "first_integral", "g_orbit_equivalent", "gt_path", "gt_path_derivative",
    "involution_from_conjugator", "involution_from_level", "involution_of", "is_T1",
    "model_from_beta", "moebius_conjugate", "norm_d", "norm_l1", "path_report", "rescale",
    "tangencies",
]

"""Families of rational first integrals: critical data, monodromy, coverings, quintics."""

from .covering import CoveringVerdict, covering_isomorphic
from .families import (CriticalBranch, DRFactorReport, RationalFamily, classify_critical_curves,
                       verify_dR_factor)
from .maps import CriticalDatum, RationalMap, critical_data, critical_values
from .monodromy import (Bouquet, MonodromyGroup, Permutation, make_bouquet, monodromy,
                        monodromy_group, monodromy_tuple)
from .quintic import QuinticCertificate, QuinticVerdict, quintic_search, quintic_verify

__all__ = [
    "Bouquet", "CoveringVerdict", "CriticalBranch", "CriticalDatum", "DRFactorReport",
    "MonodromyGroup", "Permutation", "QuinticCertificate", "QuinticVerdict", "RationalFamily",
    "RationalMap", "classify_critical_curves", "covering_isomorphic", "critical_data",
    "critical_values", "make_bouquet", "monodromy", "monodromy_group", "monodromy_tuple",
    "quintic_search", "quintic_verify", "verify_dR_factor",
]

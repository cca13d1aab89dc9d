"""Categorical readings of evidence values and their confidence intervals.

Five strength categories partition the evidence axis at +-k_p and +-k_s.
Security categories add where the interval sits relative to those
thresholds; simulation categories additionally compare the sign of the
point estimate with the known true sign.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

logger = logging.getLogger(__name__)


class InvalidIntervalError(ValueError):
    """Interval bounds are out of order."""


@dataclass(frozen=True)
class Thresholds:
    """Prognostic (k_p) and strong (k_s) evidence thresholds on the 2x scale."""

    k_p: float = 4.0
    k_s: float = 7.0

    def __post_init__(self) -> None:
        if not 0.0 < self.k_p < self.k_s:
            raise ValueError(f"need 0 < k_p < k_s, got k_p={self.k_p}, k_s={self.k_s}")


DEFAULT_THRESHOLDS = Thresholds()


class EvidenceCategory(Enum):
    STRONG_REF = "StrongRef"
    PROGNOSTIC_REF = "PrognosticRef"
    WEAK = "Weak"
    PROGNOSTIC_ALT = "PrognosticAlt"
    STRONG_ALT = "StrongAlt"


class SecurityCategory(Enum):
    SV = "SV"  # strong, very secure
    SS = "SS"  # strong, secure
    SI = "SI"  # strong, insecure
    PS = "PS"  # prognostic, secure
    PI = "PI"  # prognostic, insecure
    WI = "WI"  # weak (observed-data label)
    W = "W"  # weak (simulation label)
    MS = "MS"  # misleading (strong counterfactual), secure
    MI = "MI"  # misleading, insecure
    CS = "CS"  # confusing (prognostic counterfactual), secure
    CI = "CI"  # confusing, insecure


SIMULATION_CATEGORIES = (
    SecurityCategory.MS,
    SecurityCategory.CS,
    SecurityCategory.MI,
    SecurityCategory.CI,
    SecurityCategory.W,
    SecurityCategory.PI,
    SecurityCategory.SI,
    SecurityCategory.PS,
    SecurityCategory.SS,
)


def evidence_category(v: float, t: Thresholds = DEFAULT_THRESHOLDS) -> EvidenceCategory:
    """Strength category of a single evidence value; ties go to the weaker side."""
    if not math.isfinite(v):
        raise ValueError(f"evidence value must be finite, got {v}")
    if v > t.k_s:
        return EvidenceCategory.STRONG_REF
    if v > t.k_p:
        return EvidenceCategory.PROGNOSTIC_REF
    if v >= -t.k_p:
        return EvidenceCategory.WEAK
    if v >= -t.k_s:
        return EvidenceCategory.PROGNOSTIC_ALT
    return EvidenceCategory.STRONG_ALT


def _oriented(point: float, lower: float, upper: float):
    """Mirror negative-pointing evidence so the proximal bound is the lower one."""
    if point < 0.0:
        return -point, -upper, -lower
    return point, lower, upper


def _clamped_point(point: float, lower: float, upper: float) -> float:
    if point < lower or point > upper:
        logger.warning(
            "point evidence %.6g lies outside its interval [%.6g, %.6g]; "
            "clamping for categorization",
            point,
            lower,
            upper,
        )
        return min(max(point, lower), upper)
    return point


def security_category(
    point: float,
    lower: float,
    upper: float,
    t: Thresholds = DEFAULT_THRESHOLDS,
) -> SecurityCategory:
    """Observed-data security label from the point evidence and its interval.

    Orientation makes the point nonnegative, so the proximal bound (the one
    nearest 0) is the lower bound.  An interval overlapping 0 is insecure
    whatever the bounds.
    """
    if lower > upper:
        raise InvalidIntervalError(f"lower {lower} exceeds upper {upper}")
    point = _clamped_point(point, lower, upper)
    point, lower, upper = _oriented(point, lower, upper)
    strength = evidence_category(point, t)
    if lower <= 0.0:
        secure_level = "insecure"
    elif lower > t.k_s:
        secure_level = "very"
    elif lower > t.k_p:
        secure_level = "secure"
    else:
        secure_level = "insecure"
    if strength is EvidenceCategory.STRONG_REF:
        return {
            "very": SecurityCategory.SV,
            "secure": SecurityCategory.SS,
            "insecure": SecurityCategory.SI,
        }[secure_level]
    if strength is EvidenceCategory.PROGNOSTIC_REF:
        # A prognostic point caps the label at secure.
        if secure_level in ("very", "secure"):
            return SecurityCategory.PS
        return SecurityCategory.PI
    return SecurityCategory.WI


def simulation_category(
    point: float,
    lower: float,
    upper: float,
    true_sign: int,
    t: Thresholds = DEFAULT_THRESHOLDS,
) -> SecurityCategory:
    """Simulation-study label: security plus agreement with the known sign.

    Counterfactual (wrong-sign) strong evidence maps to misleading (MS/MI),
    counterfactual prognostic evidence to confusing (CS/CI); weak evidence is
    W regardless of sign.  SV collapses into SS in this nine-way scheme.
    """
    if true_sign not in (1, -1):
        raise ValueError(f"true_sign must be +1 or -1, got {true_sign}")
    base = security_category(point, lower, upper, t)
    if base is SecurityCategory.WI:
        return SecurityCategory.W
    if base is SecurityCategory.SV:
        base = SecurityCategory.SS
    point = _clamped_point(point, lower, upper)
    counterfactual = (1 if point >= 0.0 else -1) != true_sign
    if not counterfactual:
        return base
    return {
        SecurityCategory.SS: SecurityCategory.MS,
        SecurityCategory.SI: SecurityCategory.MI,
        SecurityCategory.PS: SecurityCategory.CS,
        SecurityCategory.PI: SecurityCategory.CI,
    }[base]

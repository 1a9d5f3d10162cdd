"""Unit conversion constants shared across the package.

All internal physics is SI (meters, seconds, watts); route geometry and
ship speeds are carried in the marine units the data files use (nautical
miles, knots) and converted at module boundaries.
"""

NM_TO_M = 1852.0
M_TO_NM = 1.0 / NM_TO_M

# International knot, exact per definition used throughout.
KT_TO_MS = 0.514444
MS_TO_KT = 1.0 / KT_TO_MS

M_TO_FT = 1.0 / 0.3048


def kt_to_ms(v_kt: float) -> float:
    return v_kt * KT_TO_MS


def ms_to_kt(v_ms: float) -> float:
    return v_ms * MS_TO_KT

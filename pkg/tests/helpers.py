"""String-level comparison helpers for printed reference values.

Reference cells carry anywhere from 3 to 30 significant digits. canon()
pushes both sides through mp.nstr at the printed digit count, so equality
means "rounds to the same printed representation"; within_ulp() measures
absolute deviation in units of the last printed digit. Both must run inside
a PrecisionContext.workdps() block.
"""

import mpmath
from mpmath import mp, mpf


def sig_digits(printed: str) -> int:
    mantissa = printed.lower().split("e")[0]
    digits = [c for c in mantissa if c.isdigit()]
    while digits and digits[0] == "0":
        digits.pop(0)
    return len(digits)


def canon(value, d: int) -> str:
    return mp.nstr(mpf(value), d, min_fixed=0, max_fixed=0)


def rounds_to(value, printed: str) -> bool:
    d = sig_digits(printed)
    return canon(value, d) == canon(mpf(printed), d)


def ulp(printed: str) -> mpf:
    lead = int(mpmath.floor(mpmath.log10(abs(mpf(printed)))))
    return mpf(10) ** (lead - sig_digits(printed) + 1)


def within_ulp(value, printed: str, units=1) -> bool:
    return abs(mpf(value) - mpf(printed)) <= units * ulp(printed)

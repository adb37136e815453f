"""Arbitrary-precision arithmetic substrate.

All heavy computation in this package runs on mpmath reals under an explicit
PrecisionContext. The context fixes the number of significant decimal digits
the caller wants to trust; internally we carry a few guard digits on top.
Results are plain mpf values, immutable and safe to share between workers.

A doubled-precision rerun (stable()) substitutes for exact symbolic
arithmetic: if a pipeline value agrees with its reprise at twice the digits,
the leading `digits - 5` figures are taken as converged.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .errors import PoleError, PrecisionError

# mpf is the package-wide real type; the alias exists so call sites read as
# domain code rather than as mpmath plumbing.
Real = mpf

GUARD_DIGITS = 10


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision plus the precision used for self-verification."""

    digits: int = 50
    verify_digits: int = 100

    def __post_init__(self):
        if self.digits < 20:
            raise ValueError("digits must be at least 20")
        if self.verify_digits < 2 * self.digits:
            raise ValueError("verify_digits must be at least 2*digits")

    @property
    def dps(self) -> int:
        """Decimal working precision actually set on mpmath (with guard)."""
        return self.digits + GUARD_DIGITS

    def workdps(self):
        """Context manager switching mpmath to this working precision."""
        return mp.workdps(self.dps)

    def verify_context(self) -> "PrecisionContext":
        return PrecisionContext(self.verify_digits, 2 * self.verify_digits)


def to_real(x, ctx: PrecisionContext) -> Real:
    """Convert int/str/Fraction/float/mpf to an mpf at ctx working precision."""
    with ctx.workdps():
        if isinstance(x, Fraction):
            return mpf(x.numerator) / x.denominator
        return mpf(x)


def ensure_finite(x: Real) -> Real:
    if not mpmath.isfinite(x):
        raise PrecisionError(f"non-finite value in pipeline: {x}")
    return x


def gamma(x, ctx: PrecisionContext) -> Real:
    """Gamma function for real non-pole arguments.

    Negative non-integer arguments go through the reflection identity
    Gamma(x) = pi / (sin(pi x) * Gamma(1 - x)) so that only positive
    arguments hit the underlying series. Needed by the closed-form spectral
    gap of the negative-alpha parameter branch.
    """
    with ctx.workdps():
        xv = to_real(x, ctx)
        if xv <= 0 and mpmath.isint(xv):
            raise PoleError(f"gamma pole at {xv}")
        if xv > 0:
            val = mpmath.gamma(xv)
        else:
            val = mpmath.pi / (mpmath.sin(mpmath.pi * xv) * mpmath.gamma(1 - xv))
        return ensure_finite(val)


def agree_digits(a: Real, b: Real) -> int:
    """Number of leading significant decimal digits on which a and b agree."""
    if a == b:
        return mp.dps
    scale = max(abs(a), abs(b))
    if scale == 0:
        return mp.dps
    rel = abs(a - b) / scale
    if rel == 0:
        return mp.dps
    return max(0, int(-mpmath.log10(rel)))


def stable(value_at_digits: Real, value_at_verify: Real, ctx: PrecisionContext) -> bool:
    """True iff the working-precision value agrees with its doubled-precision
    rerun to at least digits - 5 significant figures."""
    with ctx.workdps():
        return agree_digits(value_at_digits, value_at_verify) >= ctx.digits - 5

"""Jacobi polynomials, generalized Jacobi functions, and base-problem spectra.

The fractional operator is parametrized by (alpha, beta, s) with s in (0,1),
beta > -1 and alpha > s - 1. Its eigenfunctions are the generalized Jacobi
functions (1-x)^alpha P_n^{(alpha,beta)}(x) and its eigenvalues are ratios of
gamma functions; both are needed at large n, so eigenvalues and norms are
produced by telescoped products of rational ratios instead of raw gamma
quotients.

The x^r multiplication tables built here are the workhorse of the polynomial
FD recursion: entries[k] of table (n, r) is the coefficient of P_k in the
Jacobi expansion of x^r * P_n. Tables are memoized per (n, r, alpha, beta)
and working precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .errors import DomainError
from .numerics import PrecisionContext, Real, ensure_finite, gamma, to_real


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class OperatorParams:
    """The triple (alpha, beta, s) defining the operator and its base spectrum.

    Parameters are stored as exact rationals: they double as cache keys for
    the multiplication tables, and exactness keeps those keys stable across
    precision changes.
    """

    alpha: Fraction
    beta: Fraction
    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_fraction(self.alpha))
        object.__setattr__(self, "beta", _as_fraction(self.beta))
        object.__setattr__(self, "s", _as_fraction(self.s))
        if not (0 < self.s < 1):
            raise DomainError(f"s must lie in (0,1), got {self.s}")
        if self.beta <= -1:
            raise DomainError(f"beta must exceed -1, got {self.beta}")
        if self.alpha <= self.s - 1:
            raise DomainError(f"alpha must exceed s-1, got alpha={self.alpha}, s={self.s}")

    @property
    def negative_alpha_branch(self) -> bool:
        return self.alpha < 0


@dataclass(frozen=True)
class MultiplicationTable:
    """Expansion of x^r * P_n over P_k, k in [max(n-r,0), n+r]."""

    n: int
    r: int
    entries: dict[int, Real] = field(hash=False)

    def __getitem__(self, k: int) -> Real:
        return self.entries.get(k, mpf(0))


@dataclass(frozen=True)
class BaseEigenpair:
    n: int
    lambda0: Real
    norm_gamma: Real
    a0: Real


def jacobi_weight(x, a_exp, b_exp, ctx: PrecisionContext) -> Real:
    """(1-x)^a * (1+x)^b on (-1,1); errors at an endpoint that blows up."""
    with ctx.workdps():
        xv = to_real(x, ctx)
        av, bv = to_real(a_exp, ctx), to_real(b_exp, ctx)
        if not (-1 <= xv <= 1):
            raise DomainError(f"x={xv} outside [-1,1]")
        if xv == 1 and av < 0:
            raise DomainError("weight singular at x=1 for negative first exponent")
        if xv == -1 and bv < 0:
            raise DomainError("weight singular at x=-1 for negative second exponent")
        return ensure_finite((1 - xv) ** av * (1 + xv) ** bv)


def _xp_coeffs(k: int, a: Real, b: Real) -> tuple[Real, Real, Real]:
    """Three-term coefficients (A, B, C): x*P_k = A*P_{k+1} + B*P_k + C*P_{k-1}.

    At k=0 the generic B formula is 0/0 for a+b=0; the cancelled forms below
    are valid for all admissible (a, b).
    """
    if k == 0:
        A = 2 / (a + b + 2)
        B = (b - a) / (a + b + 2)
        return A, B, mpf(0)
    A = 2 * (k + 1) * (k + a + b + 1) / ((2 * k + a + b + 1) * (2 * k + a + b + 2))
    B = (b * b - a * a) / ((2 * k + a + b) * (2 * k + a + b + 2))
    C = 2 * (k + a) * (k + b) / ((2 * k + a + b) * (2 * k + a + b + 1))
    return A, B, C


def jacobi_poly_eval(n: int, params, x, ctx: PrecisionContext) -> Real:
    """Classical Jacobi polynomial P_n^{(a,b)}(x) via upward recurrence.

    `params` is an OperatorParams (its alpha/beta are used) or an (a, b) pair.
    The recurrence is the same three-term relation that builds the
    multiplication tables, so table reconstruction tests exercise one shared
    set of coefficients.
    """
    a_fr, b_fr = _weight_pair(params)
    with ctx.workdps():
        a, b = to_real(a_fr, ctx), to_real(b_fr, ctx)
        xv = to_real(x, ctx)
        if n == 0:
            return mpf(1)
        p_prev = mpf(1)
        p_cur = (a + b + 2) / 2 * xv + (a - b) / 2
        for k in range(1, n):
            A, B, C = _xp_coeffs(k, a, b)
            p_next = ((xv - B) * p_cur - C * p_prev) / A
            p_prev, p_cur = p_cur, p_next
        return ensure_finite(p_cur)


def gjf_eval(n: int, params: OperatorParams, x, ctx: PrecisionContext) -> Real:
    """Generalized Jacobi function (1-x)^alpha * P_n^{(alpha,beta)}(x)."""
    with ctx.workdps():
        xv = to_real(x, ctx)
        if xv <= -1 or xv > 1:
            raise DomainError(f"x={xv} outside (-1,1]")
        if xv == 1:
            if params.alpha < 0:
                raise DomainError("GJF singular at x=1 on the negative-alpha branch")
            if params.alpha == 0:
                return jacobi_poly_eval(n, params, 1, ctx)
            return mpf(0)
        w = (1 - xv) ** to_real(params.alpha, ctx)
        return ensure_finite(w * jacobi_poly_eval(n, params, xv, ctx))


def _weight_pair(params) -> tuple[Fraction, Fraction]:
    if isinstance(params, OperatorParams):
        return params.alpha, params.beta
    a, b = params
    return _as_fraction(a), _as_fraction(b)


def norm_gamma(n: int, a_exp, b_exp, ctx: PrecisionContext) -> Real:
    """Squared L2 norm of P_n^{(a,b)} against the (a,b) Jacobi weight.

    gamma_0 = 2^{a+b+1} Gamma(a+1) Gamma(b+1) / Gamma(a+b+2) and the ratio
    gamma_{k+1}/gamma_k is rational in k, so the telescoped product needs no
    gamma evaluation past n=0 and no large arguments. The k=0 ratio is taken
    in its cancelled form because (k+a+b+1) may vanish there.
    """
    a_fr, b_fr = _as_fraction(a_exp), _as_fraction(b_exp)
    if a_fr <= -1 or b_fr <= -1:
        raise DomainError("norm_gamma needs exponents > -1")
    with ctx.workdps():
        a, b = to_real(a_fr, ctx), to_real(b_fr, ctx)
        val = 2 ** (a + b + 1) * gamma(a + 1, ctx) * gamma(b + 1, ctx) / gamma(a + b + 2, ctx)
        if n >= 1:
            val *= (a + 1) * (b + 1) / (a + b + 3)
        for k in range(1, n):
            val *= ((k + a + 1) * (k + b + 1) * (2 * k + a + b + 1)) / (
                (k + 1) * (k + a + b + 1) * (2 * k + a + b + 3)
            )
        return ensure_finite(val)


def base_eigenvalue(n: int, params: OperatorParams, ctx: PrecisionContext) -> Real:
    """Base-problem eigenvalue lambda_n^(0), telescoped from n=0."""
    return base_spectrum(n, params, ctx)[n]


def base_spectrum(n_max: int, params: OperatorParams, ctx: PrecisionContext) -> list[Real]:
    """lambda_0^(0) .. lambda_{n_max}^(0) in one telescoped sweep.

    lambda_0 needs four gamma calls; each further eigenvalue is one rational
    ratio, so the sweep is O(n_max) with no large gamma arguments.
    """
    with ctx.workdps():
        a, b, s = (to_real(params.alpha, ctx), to_real(params.beta, ctx),
                   to_real(params.s, ctx))
        lam0 = (gamma(a + 1, ctx) * gamma(b + s + 1, ctx)
                / (gamma(a - s + 1, ctx) * gamma(b + 1, ctx)))
        out = [lam0]
        for k in range(1, n_max + 1):
            out.append(out[-1] * (a + k) * (b + s + k) / ((a - s + k) * (b + k)))
        return [ensure_finite(v) for v in out]


def base_eigenvalue_direct(n: int, params: OperatorParams, ctx: PrecisionContext) -> Real:
    """Four-gamma quotient form of lambda_n^(0); cross-check for the telescoped sweep."""
    with ctx.workdps():
        a, b, s = (to_real(params.alpha, ctx), to_real(params.beta, ctx),
                   to_real(params.s, ctx))
        return ensure_finite(
            gamma(n + a + 1, ctx) * gamma(n + b + s + 1, ctx)
            / (gamma(n + a - s + 1, ctx) * gamma(n + b + 1, ctx))
        )


_table_cache: dict[tuple, MultiplicationTable] = {}


def multiplication_coeffs(n: int, r: int, params, ctx: PrecisionContext) -> MultiplicationTable:
    """Multiplication table for x^r * P_n^{(a,b)}.

    Built by scattering the r-1 table through the three-term recurrence:
    every stored key k of level r-1 contributes to k-1, k, k+1 at level r.
    Keys cover the full window [max(n-r,0), n+r]; entries that are exactly
    zero by parity are stored as zeros. Cached per (n, r, a, b, precision);
    entries are immutable once built, so concurrent duplicate inserts are
    harmless.
    """
    a_fr, b_fr = _weight_pair(params)
    key = (n, r, a_fr, b_fr, ctx.dps)
    hit = _table_cache.get(key)
    if hit is not None:
        return hit
    with ctx.workdps():
        a, b = to_real(a_fr, ctx), to_real(b_fr, ctx)
        entries = {n: mpf(1)}
        for level in range(1, r + 1):
            nxt: dict[int, Real] = {}
            for k, v in entries.items():
                A, B, C = _xp_coeffs(k, a, b)
                nxt[k + 1] = nxt.get(k + 1, mpf(0)) + A * v
                nxt[k] = nxt.get(k, mpf(0)) + B * v
                if k >= 1:
                    nxt[k - 1] = nxt.get(k - 1, mpf(0)) + C * v
            lo, hi = max(n - level, 0), n + level
            entries = {k: nxt.get(k, mpf(0)) for k in range(lo, hi + 1)}
        table = MultiplicationTable(n=n, r=r, entries=entries)
    _table_cache[key] = table
    return table

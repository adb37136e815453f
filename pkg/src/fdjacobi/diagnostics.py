"""Convergence machinery as runtime-checkable quantities.

Spectral gap factors M_n, progression ratios r_n = 4 ||q||_inf M_n, the
Catalan majorant sequence, a-priori tail bounds for rank-m truncations,
Parseval coefficient norms, and a quadrature oracle for first eigenvalue
corrections. Everything here is pure; the caches are per-process memo
tables keyed by exact parameters and working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import fsum, isfinite, log, mp, mpf, sqrt

from .errors import DivergenceError, PoleError, QuadratureError
from .fd_polynomial import PolynomialPotential
from .jacobi_basis import OperatorParams, base_spectrum, jacobi_poly_eval, norm_gamma
from .numerics import PrecisionContext, Real, ensure_finite, gamma, to_real


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-index convergence data; converges means r_n < 1 (sufficient only)."""

    n: int
    M_n: Real
    q_inf: Real
    r_n: Real
    converges: bool
    ctx: PrecisionContext

    def eig_bound(self, m: int) -> Real:
        return apriori_bounds(m, self.r_n, self.q_inf, self.ctx)[0]

    def fun_bound(self, m: int) -> Real:
        return apriori_bounds(m, self.r_n, self.q_inf, self.ctx)[1]


def _double_factorial(k: int) -> int:
    """k!! in exact integer arithmetic, with (-1)!! = 0!! = 1."""
    if k <= 0:
        return 1
    return math.prod(range(k, 0, -2))


def majorant(j: int) -> int:
    """Catalan majorant term: 1, 1, 2, 5, 14, ... as exact integers.

    Solves the convolution fixed point U_{j+1} = sum_{l<=j} U_{j-l} U_l
    with U_0 = 1, which dominates the normalized correction norms.
    """
    if j < 0:
        raise ValueError("majorant index must be nonnegative")
    return math.comb(2 * j, j) // (j + 1)


def formal_backward_gap(params: OperatorParams, ctx: PrecisionContext) -> Real:
    """Backward-gap closed form continued to index 0.

    There is no eigenvalue below the first one, but the gamma-ratio gap
    expression still evaluates at n = 0 and the reference ratio values for
    index 0 require it as the sharper candidate. At alpha = beta = 0 the
    expression is a 0 * inf limit whose value is 2 s Gamma(s)/Gamma(1-s);
    a pole with alpha = 0 alone (or beta + s = 0) means no finite backward
    constraint, reported as +inf.
    """
    a, b, s = params.alpha, params.beta, params.s
    with ctx.workdps():
        sv = to_real(s, ctx)
        if a == 0 and b == 0:
            return ensure_finite(2 * sv * gamma(sv, ctx) / gamma(1 - sv, ctx))
        if a == 0 or b + s == 0:
            return mpf("inf")
        try:
            av, bv = to_real(a, ctx), to_real(b, ctx)
            return sv * (av + bv) * gamma(av, ctx) * gamma(bv + sv, ctx) / (
                gamma(av - sv + 1, ctx) * gamma(bv + 1, ctx))
        except PoleError:
            return mpf("inf")


def closed_form_gap(n: int, params: OperatorParams, ctx: PrecisionContext) -> Real:
    """lambda_n^(0) - lambda_{n-1}^(0) as a gamma ratio.

    Cross-check for the direct spectrum differences (n >= 1); n = 0 returns
    the formal continuation used by the gap factor at the lowest index.
    """
    if n == 0:
        return formal_backward_gap(params, ctx)
    with ctx.workdps():
        av = to_real(params.alpha, ctx)
        bv = to_real(params.beta, ctx)
        sv = to_real(params.s, ctx)
        return ensure_finite(
            sv * (2 * n + av + bv) * gamma(n + av, ctx) * gamma(n + bv + sv, ctx)
            / (gamma(n + av - sv + 1, ctx) * gamma(n + bv + 1, ctx)))


def spectral_gap_M(n: int, params: OperatorParams, ctx: PrecisionContext) -> Real:
    """Gap factor M_n: reciprocal of the smaller neighboring spectral gap.

    Computed directly from base eigenvalue differences, never from the
    gamma-ratio form (which degenerates at n = 0 for alpha = beta = 0).
    Index 0 keeps the formal backward candidate when positive and finite;
    forward-only would not reproduce the reference index-0 ratios.
    """
    with ctx.workdps():
        spec = base_spectrum(n + 1, params, ctx)
        cands = [1 / (spec[n + 1] - spec[n])]
        if n >= 1:
            cands.append(1 / (spec[n] - spec[n - 1]))
        else:
            g = formal_backward_gap(params, ctx)
            if isfinite(g) and g > 0:
                cands.append(1 / g)
        return max(cands)


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    """Exact rational division of ascending coefficient lists."""
    rem = list(a)
    quo = [Fraction(0)] * max(len(rem) - len(b) + 1, 0)
    for k in range(len(rem) - len(b), -1, -1):
        coef = rem[k + len(b) - 1] / b[-1]
        quo[k] = coef
        if coef:
            for i, bc in enumerate(b):
                rem[k + i] -= coef * bc
    while rem and not rem[-1]:
        rem.pop()
    return quo, rem


def _squarefree(coeffs: list[Fraction]) -> list[Fraction]:
    """Square-free part via gcd with the derivative, exact over Q.

    Repeated critical points make Durand-Kerner linearly convergent, which
    stalls at high working precision; after this reduction every root is
    simple and isolation is quadratic again.
    """
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    a, b = list(coeffs), deriv
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if len(a) <= 1:
        return list(coeffs)
    gcd = [c / a[-1] for c in a]
    quo, _ = _poly_divmod(coeffs, gcd)
    return quo


def potential_sup_norm(q, ctx: PrecisionContext) -> Real:
    """max over [-1,1] of |q|: endpoints plus real critical points of q'.

    q is a PolynomialPotential or the builtin "step" (indicator of (0,1],
    sup 1). Critical points come from the square-free part of q', so
    multiplicities never degrade the root isolation; only roots that are
    real to half the working digits and interior count.
    """
    if isinstance(q, str):
        if q == "step":
            return mpf(1)
        raise ValueError("sup norm is not defined for external overlap sources")
    with ctx.workdps():
        if q.is_zero:
            return mpf(0)
        best = max(abs(q.eval_mp(mpf(-1))), abs(q.eval_mp(mpf(1))))
        deriv = [i * c for i, c in enumerate(q.coeffs)][1:]
        while deriv and deriv[-1] == 0:
            deriv.pop()
        if len(deriv) >= 2:
            deriv = _squarefree(deriv)
            poly = [to_real(c, ctx) for c in reversed(deriv)]
            for root in mp.polyroots(poly, maxsteps=200, extraprec=ctx.dps):
                re, im = mp.re(root), mp.im(root)
                if abs(im) < mpf(10) ** (-(ctx.digits // 2)) and -1 < re < 1:
                    best = max(best, abs(q.eval_mp(re)))
        return ensure_finite(best)


def apriori_bounds(m: int, r_n, q_inf, ctx: PrecisionContext) -> tuple[Real, Real]:
    """Tail bounds for the rank-m truncation: (eigenvalue, eigenfunction).

    eig = 2 q r^m (2m-1)!!/((2m+2)!! (1-r)) and
    fun = 2 r^{m+1} (2m+1)!!/((2m+4)!! (1-r)); the double factorials are
    exact integers so the bounds are usable as test thresholds.
    """
    if m < 1:
        raise ValueError("rank m must be >= 1")
    with ctx.workdps():
        r, q = to_real(r_n, ctx), to_real(q_inf, ctx)
        if r >= 1:
            raise DivergenceError(f"progression ratio {r} >= 1: tail bounds diverge")
        eig = 2 * q * r ** m / (1 - r) * to_real(
            Fraction(_double_factorial(2 * m - 1), _double_factorial(2 * m + 2)), ctx)
        fun = 2 * r ** (m + 1) / (1 - r) * to_real(
            Fraction(_double_factorial(2 * m + 1), _double_factorial(2 * m + 4)), ctx)
        return ensure_finite(eig), ensure_finite(fun)


def correction_bound(j: int, r_n, q_inf, ctx: PrecisionContext) -> Real:
    """Per-step majorant for |lambda^(j)|, j >= 1."""
    if j < 1:
        raise ValueError("correction index must be >= 1")
    with ctx.workdps():
        r, q = to_real(r_n, ctx), to_real(q_inf, ctx)
        return ensure_finite(2 * q * r ** (j - 1) * to_real(
            Fraction(_double_factorial(2 * j - 3), _double_factorial(2 * j)), ctx))


def norm_bound(j: int, r_n, ctx: PrecisionContext) -> Real:
    """Per-step majorant for ||u^(j)||, j >= 0 (equals 1 at j = 0)."""
    if j < 0:
        raise ValueError("correction index must be >= 0")
    with ctx.workdps():
        r = to_real(r_n, ctx)
        return ensure_finite(2 * r ** j * to_real(
            Fraction(_double_factorial(2 * j - 1), _double_factorial(2 * j + 2)), ctx))


_gamma_cache: dict[tuple, list] = {}


def _norm_gammas(k_max: int, params: OperatorParams, ctx: PrecisionContext) -> list:
    """gamma_0..gamma_{k_max} memo per (alpha, beta, precision).

    Appends are GIL-atomic and entries immutable, so concurrent growth is
    at worst duplicated work.
    """
    key = (params.alpha, params.beta, ctx.dps)
    lst = _gamma_cache.setdefault(key, [])
    while len(lst) <= k_max:
        lst.append(norm_gamma(len(lst), params.alpha, params.beta, ctx))
    return lst


def coefficient_norm(coeffs: dict[int, Real], params: OperatorParams,
                     ctx: PrecisionContext) -> Real:
    """Parseval norm sqrt(sum_k a_k^2 gamma_k) of a coefficient map.

    The eigenfunction basis is orthogonal with squared norms gamma_k, so
    this is the L2 norm against the operator's inner-product weight.
    """
    items = [(k, v) for k, v in coeffs.items() if v]
    if not items:
        return mpf(0)
    with ctx.workdps():
        gammas = _norm_gammas(max(k for k, _ in items), params, ctx)
        return ensure_finite(sqrt(fsum(v * v * gammas[k] for k, v in items)))


def rayleigh_correction_oracle(n: int, params: OperatorParams, q,
                               ctx: PrecisionContext) -> Real:
    """First eigenvalue correction by adaptive quadrature; a test oracle.

    Integrates q u^2 against the inner-product weight for the normalized
    base eigenfunction u. The squared function contributes (1-x)^{2 alpha}
    against the (-alpha, beta) weight, so the combined integrand is
    q P_n^2 (1-x)^alpha (1+x)^beta / gamma_n: endpoint singularities are
    integrable and the tanh-sinh rule absorbs them. The step potential
    restricts the range to (0,1) with q = 1 there.
    """
    with ctx.workdps():
        if isinstance(q, PolynomialPotential) and q.is_zero:
            return mpf(0)
        av, bv = to_real(params.alpha, ctx), to_real(params.beta, ctx)
        gam = norm_gamma(n, params.alpha, params.beta, ctx)
        if isinstance(q, str):
            if q != "step":
                raise ValueError("oracle needs a polynomial potential or \"step\"")
            qf = lambda x: mpf(1)
            interval = [mpf(0), mpf(1)]
        else:
            qf = q.eval_mp
            interval = [mpf(-1), mpf(1)]

        def integrand(x):
            om, op = 1 - x, 1 + x
            if om <= 0 or op <= 0:
                return mpf(0)
            p = jacobi_poly_eval(n, params, x, ctx)
            return qf(x) * p * p * om ** av * op ** bv

        val, err = mp.quad(integrand, interval, error=True, maxdegree=10)
        tol = mpf(10) ** (-25)
        if not isfinite(val) or err > tol * max(mpf(1), abs(val)):
            raise QuadratureError(f"error estimate {err} misses the 1e-25 target")
        return ensure_finite(val / gam)


def gap_limit_trend(params: OperatorParams, n_max: int, ctx: PrecisionContext) -> str:
    """Classify 2s M_n on the tail [n_max//2, n_max].

    Returns "diverging", "to 1", or "to 0" from the measured power-law
    exponent of the tail (fitted slope of log(2s M_n) against log n), not
    from the parameters. Exponents within 0.05 of zero read as "to 1";
    the window limits resolution near that boundary.
    """
    if n_max < 20:
        raise ValueError("n_max must be at least 20")
    with ctx.workdps():
        sv = to_real(params.s, ctx)
        spec = base_spectrum(n_max + 1, params, ctx)
        lo = n_max // 2
        vals = []
        for k in range(lo, n_max + 1):
            bwd = spec[k] - spec[k - 1]
            fwd = spec[k + 1] - spec[k]
            vals.append(2 * sv * max(1 / bwd, 1 / fwd))
        exponent = log(vals[-1] / vals[0]) / log(mpf(n_max) / lo)
        if exponent > mpf("0.05"):
            return "diverging"
        if exponent < mpf("-0.05"):
            return "to 0"
        return "to 1"


def convergence_report(n: int, params: OperatorParams, q,
                       ctx: PrecisionContext) -> ConvergenceReport:
    """Assemble the per-index report: M_n, ||q||_inf, r_n = 4 ||q||_inf M_n."""
    with ctx.workdps():
        M = spectral_gap_M(n, params, ctx)
        qi = potential_sup_norm(q, ctx)
        r = ensure_finite(4 * qi * M)
        return ConvergenceReport(n=n, M_n=M, q_inf=qi, r_n=r,
                                 converges=bool(r < 1), ctx=ctx)

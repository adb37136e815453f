"""FD-method recursion for polynomial potentials.

Each step j maps the coefficient table a_k^(j) of the j-th eigenfunction
correction (in the generalized-Jacobi-function basis) to the table at j+1,
together with the eigenvalue correction lambda_n^(j+1). The support of step
j is confined to the window [max(0, n - r*j), n + r*j] where r is the
potential degree; the recursion touches three bands of the new window:

  interior   [max(0, n-r*j), n+r*j] minus {n}: previous-step history enters
             through the lambda * a products,
  new outer  (n+r*j, n+r*(j+1)],
  new lower  [max(0, n-r*(j+1)), max(0, n-r*j) - 1] (empty once the window
             hits zero),

and on the two new bands only the potential term contributes. a_n^(j) = 0
for j >= 1 is enforced by construction (orthogonality of corrections to the
base eigenfunction).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import fsum, mpf, sqrt

from .errors import SingularGapError
from .jacobi_basis import (
    OperatorParams,
    base_spectrum,
    gjf_eval,
    multiplication_coeffs,
    norm_gamma,
)
from .numerics import PrecisionContext, Real, ensure_finite, to_real


@dataclass(frozen=True)
class PolynomialPotential:
    """q(x) = sum_l coeffs[l] * x^l with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        if not cs:
            cs = (Fraction(0),)
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_spec(cls, text: str) -> "PolynomialPotential":
        """Parse 'c0,c1,...,cr' with entries like 1/4 or 0.25."""
        return cls(tuple(Fraction(p.strip()) for p in text.split(",")))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def eval_mp(self, x: Real) -> Real:
        """Horner evaluation under the ambient mpmath precision."""
        acc = mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + mpf(c.numerator) / c.denominator
        return acc


@dataclass(frozen=True)
class CorrectionState:
    """Step-j correction for the target eigenpair n.

    coeffs holds a_k^(j) on the step-j window; lambdas holds
    lambda_n^(0) .. lambda_n^(j). a0 is the (constant) leading coefficient
    a_n^(0) of the base term, and prev links back to step j-1 because the
    interior-band update needs the whole coefficient history.
    """

    n: int
    j: int
    coeffs: dict[int, Real]
    lambdas: tuple[Real, ...]
    a0: Real
    prev: "CorrectionState | None" = None

    def __post_init__(self):
        if self.j >= 1 and self.coeffs.get(self.n, mpf(0)) != 0:
            raise ValueError("a_n^(j) must vanish for j >= 1")

    def window(self, r: int) -> tuple[int, int]:
        return max(0, self.n - r * self.j), self.n + r * self.j

    def history(self) -> list["CorrectionState"]:
        chain = []
        st: CorrectionState | None = self
        while st is not None:
            chain.append(st)
            st = st.prev
        chain.reverse()
        return chain


@dataclass(frozen=True)
class EigenpairApproximation:
    """Rank-m truncation: lambda_sum = sum of the m+1 eigenvalue corrections."""

    n: int
    m: int
    params: OperatorParams
    normalization: str
    lambda_sum: Real
    states: tuple
    correction_norms: tuple[Real, ...]
    truncation_delta: Real | None = None

    @property
    def lambdas(self) -> tuple[Real, ...]:
        return self.states[-1].lambdas


def init_state(n: int, params: OperatorParams, ctx: PrecisionContext,
               normalization: str = "normalized") -> CorrectionState:
    """Step-0 state: single coefficient a_n^(0) and the base eigenvalue.

    normalization 'normalized' sets a_n^(0) = gamma_n^{-1/2} (unit L2 norm
    against the operator weight); 'leading-one' sets a_n^(0) = 1, the
    convention in which the closed-form coefficient fractions of the cubic
    test problem come out verbatim.
    """
    if normalization not in ("normalized", "leading-one"):
        raise ValueError(f"unknown normalization {normalization!r}")
    with ctx.workdps():
        lam0 = base_spectrum(n, params, ctx)[n]
        if normalization == "normalized":
            a0 = 1 / sqrt(norm_gamma(n, params.alpha, params.beta, ctx))
        else:
            a0 = mpf(1)
        return CorrectionState(n=n, j=0, coeffs={n: a0}, lambdas=(lam0,), a0=a0)


def _potential_image(state: CorrectionState, q: PolynomialPotential, m: int,
                     params: OperatorParams, ctx: PrecisionContext) -> Real:
    """Coefficient of P_m in q(x) * u^(j): sum_l c_l sum_k a_k^(j) T(k,l)[m]."""
    terms = []
    for l, c in enumerate(q.coeffs):
        if c == 0:
            continue
        cv = to_real(c, ctx)
        for k, a in state.coeffs.items():
            if a == 0 or abs(k - m) > l:
                continue
            terms.append(cv * a * multiplication_coeffs(k, l, params, ctx)[m])
    return fsum(terms) if terms else mpf(0)


def eigenvalue_correction(state_j: CorrectionState, q: PolynomialPotential,
                          params: OperatorParams, ctx: PrecisionContext) -> Real:
    """lambda_n^(j+1) = (a_n^(0))^{-1} * [coefficient of P_n in q u^(j)]."""
    with ctx.workdps():
        return ensure_finite(
            _potential_image(state_j, q, state_j.n, params, ctx) / state_j.a0
        )


def solvability_residual(state_j: CorrectionState, q: PolynomialPotential,
                         lambda_next: Real, params: OperatorParams,
                         ctx: PrecisionContext) -> Real:
    """Coefficient of the base GJF in the step right-hand side.

    lambda_next is defined to annihilate it, so this returns the machine
    residual of that cancellation; anything beyond rounding noise flags a
    bookkeeping bug in the band recursion.
    """
    with ctx.workdps():
        return lambda_next * state_j.a0 - _potential_image(state_j, q, state_j.n, params, ctx)


def _gap(spec: list[Real], m: int, n: int, ctx: PrecisionContext) -> Real:
    gap = spec[m] - spec[n]
    tiny = mpf(10) ** (-(ctx.digits // 2)) * max(mpf(1), abs(spec[n]))
    if abs(gap) < tiny:
        raise SingularGapError(f"base eigenvalues {m} and {n} closer than {tiny}")
    return gap


def advance(state_j: CorrectionState, q: PolynomialPotential,
            params: OperatorParams, ctx: PrecisionContext,
            spectrum: list[Real] | None = None) -> CorrectionState:
    """One FD step: build the step-(j+1) state from the step-j state."""
    n, j, r = state_j.n, state_j.j, q.degree
    with ctx.workdps():
        if spectrum is None:
            spectrum = base_spectrum(n + r * (j + 1), params, ctx)
        lam_next = eigenvalue_correction(state_j, q, params, ctx)
        lambdas = state_j.lambdas + (lam_next,)
        history = state_j.history()

        lo_j, hi_j = state_j.window(r)
        lo_new, hi_new = max(0, n - r * (j + 1)), n + r * (j + 1)
        coeffs: dict[int, Real] = {}
        for m in range(lo_new, hi_new + 1):
            if m == n:
                coeffs[m] = mpf(0)
                continue
            s_m = _potential_image(state_j, q, m, params, ctx)
            if lo_j <= m <= hi_j:
                # interior band: history of this coefficient feeds back
                p_min = (abs(m - n) + r - 1) // r
                p_max = min(j, n + r * j)
                terms = []
                for p in range(max(1, p_min), p_max + 1):
                    a_prev = history[p].coeffs.get(m)
                    if a_prev:
                        terms.append(lambdas[j + 1 - p] * a_prev)
                num = fsum(terms) - s_m if terms else -s_m
            else:
                # newly created outer or lower band
                num = -s_m
            coeffs[m] = ensure_finite(num / _gap(spectrum, m, n, ctx))

        return CorrectionState(n=n, j=j + 1, coeffs=coeffs, lambdas=lambdas,
                               a0=state_j.a0, prev=state_j)


def run(n: int, m: int, params: OperatorParams, q: PolynomialPotential,
        ctx: PrecisionContext, normalization: str = "normalized") -> EigenpairApproximation:
    """Rank-m FD approximation of eigenpair n for a polynomial potential."""
    from .diagnostics import coefficient_norm

    with ctx.workdps():
        spectrum = base_spectrum(n + q.degree * m + 1, params, ctx)
        state = init_state(n, params, ctx, normalization)
        states = [state]
        for _ in range(m):
            state = advance(state, q, params, ctx, spectrum)
            states.append(state)
        lam_sum = ensure_finite(fsum(state.lambdas))
        norms = tuple(coefficient_norm(st.coeffs, params, ctx) for st in states)
        return EigenpairApproximation(
            n=n, m=m, params=params, normalization=normalization,
            lambda_sum=lam_sum, states=tuple(states), correction_norms=norms,
        )


def eval_eigenfunction(approx: EigenpairApproximation, x, ctx: PrecisionContext) -> Real:
    """Evaluate the rank-m eigenfunction sum at a point."""
    with ctx.workdps():
        totals: dict[int, Real] = {}
        for st in approx.states:
            for k, a in st.coeffs.items():
                if a:
                    totals[k] = totals.get(k, mpf(0)) + a
        return ensure_finite(fsum(
            a * gjf_eval(k, approx.params, x, ctx) for k, a in sorted(totals.items()) if a
        ))

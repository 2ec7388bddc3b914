"""Closed-form sample thresholds and success-probability lower bounds.

All logarithms are natural. Thresholds are rounded up to the next integer
number of measurements. Lower bounds that are not positive are returned as
computed and flagged ``vacuous`` rather than clipped.
"""

import math
from dataclasses import dataclass, field

from .exceptions import DomainError

__all__ = [
    'BoundReport', 'f_exponent', 'sparse_t_choice', 'sparse_conditional_term',
    'q_norm_tail', 'generic_failure', 'sparse_failure_terms',
    'sparse_gaussian_bound', 'block_failure_terms', 'block_t_choice',
    'block_gaussian_bound', 'lowrank_t_choice', 'lowrank_conditional_term',
    'lowrank_sufficient_condition', 'lowrank_gaussian_bound',
    'bernoulli_q_radius', 'bernoulli_sparse_failure_terms',
    'bernoulli_sparse_bound', 'bernoulli_block_bound', 'borell_tail',
    'vershynin_tail', 'achlioptas_tail', 'aux_tails',
    'DEFAULT_THETA', 'DEFAULT_GAMMA', 'DEFAULT_C0', 'DEFAULT_C1',
]

# Illustrative values for constants whose existence (not value) is asserted.
DEFAULT_THETA = 1.0
DEFAULT_GAMMA = 1.0 / 16
DEFAULT_C0 = 1.0
DEFAULT_C1 = 1.0


@dataclass(frozen=True)
class BoundReport:
    model_kind: str
    ensemble: str
    parameters: dict
    m_threshold: int
    success_prob_lower: float
    d_T: int
    internals: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def vacuous(self):
        return self.success_prob_lower <= 0

    @property
    def failure_prob_upper(self):
        return 1.0 - self.success_prob_lower


def _ceil(x):
    # guard against x = 690.0000000000001 from rounding
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


def _require(cond, msg):
    if not cond:
        raise DomainError(msg)


def _check_beta_gt1(beta):
    _require(beta > 1, f"beta must exceed 1 (got {beta})")


def _check_int(name, v, lo=1):
    _require(int(v) == v and v >= lo, f"{name} must be an integer >= {lo} (got {v})")


def _vacuous_notes(p):
    return ('vacuous: lower bound is not positive',) if p <= 0 else ()


# -- generic ----------------------------------------------------------------

def q_norm_tail(m, d_T, t):
    """Chi-square tail for the multiplier norm.

    Returns ``(prob, radius)`` where ``prob = exp(-t^2 / (4 (m-d_T+1)))``
    bounds ``P[||q|| >= radius * ||e||]`` and
    ``radius = sqrt(m / (m - d_T + 1 - t))``.
    """
    _require(m >= d_T >= 1, f"need m >= d_T >= 1 (got m={m}, d_T={d_T})")
    nu = m - d_T + 1
    _require(t > 0, f"t must be positive (got {t})")
    _require(t < nu, f"t must be below m - d_T + 1 = {nu} (got {t})")
    return math.exp(-t * t / (4.0 * nu)), math.sqrt(m / (nu - t))


def generic_failure(m, d_T, t, conditional_term):
    """Success lower bound ``1 - conditional_term - q_norm_tail``."""
    _require(0 <= conditional_term <= 1,
             f"conditional_term must lie in [0, 1] (got {conditional_term})")
    tail, _ = q_norm_tail(m, d_T, t)
    return 1.0 - conditional_term - tail


# -- sparse, Gaussian -------------------------------------------------------

def f_exponent(beta, s):
    """``(sqrt(beta/(2s) + beta - 1) - sqrt(beta/(2s)))^2``."""
    _check_beta_gt1(beta)
    _require(s >= 1, f"s must be at least 1 (got {s})")
    a = beta / (2.0 * s)
    # difference of square roots rewritten to avoid cancellation near beta=1
    return ((beta - 1) / (math.sqrt(a + beta - 1) + math.sqrt(a)))**2


def sparse_t_choice(beta, s, n):
    """``t = 2 beta ln(n) (sqrt(1 + 2 s (beta-1)/beta) - 1)``.

    This choice equalizes the two failure terms when the chi-square degrees
    of freedom ``m - s + 1`` equal ``2 beta s ln n``.
    """
    _check_beta_gt1(beta)
    _require(s >= 1, f"s must be at least 1 (got {s})")
    _require(n >= 2, f"n must be at least 2 (got {n})")
    x = 2.0 * s * (beta - 1) / beta
    return 2.0 * beta * math.log(n) * x / (math.sqrt(1 + x) + 1)


def sparse_conditional_term(n, s, m, tau):
    """Union bound ``n exp(-m / (2 tau^2))`` on the off-support sup norm,
    clipped at 1."""
    _require(n >= 1 and 1 <= s <= n, f"need 1 <= s <= n (got s={s}, n={n})")
    _require(m > 0, f"m must be positive (got {m})")
    _require(tau > 0, f"tau must be positive (got {tau})")
    return min(1.0, n * math.exp(-m / (2.0 * tau * tau)))


def sparse_failure_terms(beta, s, n, m, t=None):
    """The two failure terms at ``m`` measurements.

    Returns ``(conditional, q_tail)`` using ``tau^2 = m s / (m - s + 1 - t)``
    and, by default, ``t = sparse_t_choice(beta, s, n)``. The conditional
    term is not clipped here.
    """
    if t is None:
        t = sparse_t_choice(beta, s, n)
    tail, radius = q_norm_tail(m, s, t)
    tau = radius * math.sqrt(s)
    return n * math.exp(-m / (2.0 * tau * tau)), tail


def sparse_gaussian_bound(beta, s, n):
    """``m >= 2 beta s ln n + s`` with success at least ``1 - 2 n^{-f}``."""
    _check_beta_gt1(beta)
    _check_int('s', s)
    _check_int('n', n, 2)
    _require(s <= n, f"s must not exceed n (got s={s}, n={n})")
    m_star = _ceil(2 * beta * s * math.log(n) + s)
    f = f_exponent(beta, s)
    p = 1.0 - 2.0 * n**(-f)
    t = sparse_t_choice(beta, s, n)
    internals = {'f': f, 't': t}
    if t < m_star - s + 1:
        internals['tau'] = q_norm_tail(m_star, s, t)[1] * math.sqrt(s)
    notes = ['Gaussian sparse recovery threshold with success 1 - 2 n^-f(beta,s)',
             't chosen to equalize the two exponential failure terms']
    if m_star >= n:
        notes.append(f'degenerate: m_threshold {m_star} >= n {n}')
    notes.extend(_vacuous_notes(p))
    return BoundReport('sparse', 'gaussian', {'beta': beta, 's': s, 'n': n},
                       m_star, p, s, internals, tuple(notes))


# -- block, Gaussian --------------------------------------------------------

def _block_width(B, M):
    return math.sqrt(B) + math.sqrt(2 * math.log(M))


def block_t_choice(beta, k, B, M):
    """``t = (beta/2) k (sqrt(B) + sqrt(2 ln M))^2``."""
    return 0.5 * beta * k * _block_width(B, M)**2


def block_failure_terms(m, t, k, B, M):
    """``(M exp(-0.5 [sqrt((m-kB+1-t)/k) - sqrt(B)]^2), exp(-t^2/4/(m-kB+1)))``.

    The first term uses the Borell tail of ``sqrt(chi^2_B)``, which only
    applies when ``sqrt((m-kB+1-t)/k) >= sqrt(B)``; below that it is set
    to ``M`` (the bound on each block probability is 1).
    """
    _check_int('k', k)
    _check_int('B', B)
    _check_int('M', M)
    tail, _ = q_norm_tail(m, k * B, t)
    gap = math.sqrt((m - k * B + 1 - t) / k) - math.sqrt(B)
    cond = M * math.exp(-0.5 * gap * gap) if gap >= 0 else float(M)
    return cond, tail


def block_gaussian_bound(beta, k, B, M):
    """``m >= (1+beta) k (sqrt(B) + sqrt(2 ln M))^2 + kB``.

    Success is reported as ``1 - M^{-beta/4} - M^{-beta^2/(8+8 beta)}``.
    """
    _require(beta > 0, f"beta must be positive (got {beta})")
    _check_int('k', k)
    _check_int('B', B)
    _check_int('M', M)
    _require(k <= M, f"k must not exceed M (got k={k}, M={M})")
    w2 = _block_width(B, M)**2
    m_star = _ceil((1 + beta) * k * w2 + k * B)
    p = 1.0 - M**(-beta / 4) - M**(-beta**2 / (8 + 8 * beta))
    t = block_t_choice(beta, k, B, M)
    internals = {'t': t, 'width_sq': w2}
    if t < m_star - k * B + 1:
        cond, tail = block_failure_terms(m_star, t, k, B, M)
        internals.update(conditional_term=cond, q_tail=tail)
    notes = ['Gaussian block-sparse threshold',
             'probability is 1 minus the failure sum M^(-beta/4) + '
             'M^(-beta^2/(8+8beta)); the source states the sum itself',
             'strict m > threshold in the source; reported as ceiling']
    notes.extend(_vacuous_notes(p))
    return BoundReport('block', 'gaussian',
                       {'beta': beta, 'k': k, 'B': B, 'M': M},
                       m_star, p, k * B, internals, tuple(notes))


# -- low rank, Gaussian -----------------------------------------------------

def lowrank_t_choice(beta, r, n1, n2):
    """``t = (sqrt(2r+1) - 1)(beta - 1)(3 n1 + 3 n2 - 5r)``."""
    return (math.sqrt(2 * r + 1) - 1) * (beta - 1) * (3 * n1 + 3 * n2 - 5 * r)


def lowrank_conditional_term(m, r, n1, n2, tau):
    """Davidson-Szarek bound on ``P[||P_Tperp(Y)|| > 1 | ||q|| <= tau]``.

    ``exp(-0.5 (sqrt(m)/tau - sqrt(n1-r) - sqrt(n2-r))^2)`` when the
    bracket is nonnegative, else 1.
    """
    _require(tau > 0, f"tau must be positive (got {tau})")
    _require(1 <= r <= min(n1, n2), f"need 1 <= r <= min(n1, n2) (got r={r})")
    gap = math.sqrt(m) / tau - math.sqrt(n1 - r) - math.sqrt(n2 - r)
    return math.exp(-0.5 * gap * gap) if gap >= 0 else 1.0


def lowrank_sufficient_condition(m, r, n1, n2, t):
    """``m >= r(n1+n2-r) + (sqrt(r(n1-r)) + sqrt(r(n2-r)))^2 + t - 1``."""
    d_T = r * (n1 + n2 - r)
    rhs = d_T + (math.sqrt(r * (n1 - r)) + math.sqrt(r * (n2 - r)))**2 + t - 1
    # slack for equality cases such as n1 == n2, t == 0
    return m >= rhs - 1e-9 * max(1.0, abs(rhs))


def lowrank_gaussian_bound(beta, r, n1, n2):
    """``m >= beta r (3 n1 + 3 n2 - 5 r)`` with success
    ``1 - 2 exp((1 - beta) max(n1, n2) / 8)``."""
    _check_beta_gt1(beta)
    _check_int('r', r)
    _check_int('n1', n1)
    _check_int('n2', n2)
    _require(r <= min(n1, n2), f"r must not exceed min(n1, n2) (got r={r})")
    d_T = r * (n1 + n2 - r)
    m_star = _ceil(beta * r * (3 * n1 + 3 * n2 - 5 * r))
    p = 1.0 - 2.0 * math.exp((1 - beta) * max(n1, n2) / 8.0)
    t = lowrank_t_choice(beta, r, n1, n2)
    internals = {'t': t}
    if t < m_star - d_T + 1:
        tail, radius = q_norm_tail(m_star, d_T, t)
        tau = radius * math.sqrt(r)
        internals.update(
            tau=tau, q_tail=tail,
            conditional_term=lowrank_conditional_term(m_star, r, n1, n2, tau))
    notes = ['Gaussian nuclear-norm threshold']
    notes.extend(_vacuous_notes(p))
    return BoundReport('lowrank', 'gaussian',
                       {'beta': beta, 'r': r, 'n1': n1, 'n2': n2},
                       m_star, p, d_T, internals, tuple(notes))


# -- sign (Bernoulli) ensembles ----------------------------------------------

def _check_eps(eps):
    _require(0 < eps < 1, f"eps must lie in (0, 1) (got {eps})")


def bernoulli_q_radius(s, m, t, theta=DEFAULT_THETA):
    """``rho = sqrt(s) / (1 - theta sqrt(s/m) - t)``, the multiplier-norm
    radius implied by the smallest-singular-value deviation bound."""
    denom = 1 - theta * math.sqrt(s / m) - t
    _require(denom > 0, f"1 - theta sqrt(s/m) - t must be positive (got {denom})")
    return math.sqrt(s) / denom


def bernoulli_sparse_failure_terms(m, s, n, eps, theta=DEFAULT_THETA,
                                   gamma=DEFAULT_GAMMA):
    """``(2 (n-s) exp(-m / (2 rho^2)), exp(-gamma m t^2))`` with ``t = eps/2``."""
    _check_eps(eps)
    t = eps / 2
    rho = bernoulli_q_radius(s, m, t, theta)
    return 2 * (n - s) * math.exp(-m / (2 * rho * rho)), vershynin_tail(t, m, gamma)


def bernoulli_sparse_bound(beta, eps, s, n, c0=DEFAULT_C0, c1=DEFAULT_C1):
    """Sign-ensemble sparse threshold ``2 beta (1-eps)^-2 s ln n + s`` with
    success ``1 - n^{1-beta} - n^{-c1 beta eps^2}``, valid once
    ``n >= exp(c0 / eps^2)``."""
    _check_beta_gt1(beta)
    _check_eps(eps)
    _check_int('s', s)
    _check_int('n', n, 2)
    _require(s <= n, f"s must not exceed n (got s={s}, n={n})")
    _require(c0 > 0 and c1 > 0, "c0 and c1 must be positive")
    m_star = _ceil(2 * beta * s * math.log(n) / (1 - eps)**2 + s)
    p = 1.0 - n**(1 - beta) - n**(-c1 * beta * eps**2)
    gate = math.log(n) >= c0 / eps**2
    notes = ['sign-ensemble sparse threshold; c0, c1 are caller-supplied',
             'gate n >= exp(c0/eps^2) ' + ('holds' if gate else 'FAILS')]
    notes.extend(_vacuous_notes(p))
    return BoundReport('sparse', 'sign',
                       {'beta': beta, 'eps': eps, 's': s, 'n': n,
                        'c0': c0, 'c1': c1},
                       m_star, p, s, {'gate_holds': gate}, tuple(notes))


def bernoulli_block_bound(beta, eps, k, B, M, c0=DEFAULT_C0, c1=DEFAULT_C1):
    """Sign-ensemble block threshold ``4 k beta (1-eps)^-2 ln M + 2kB`` with
    success ``1 - M^{1-beta} - M^{-c1 beta eps^2}``, valid once
    ``M >= exp(c0 / eps^2)``."""
    _check_beta_gt1(beta)
    _check_eps(eps)
    _check_int('k', k)
    _check_int('B', B)
    _check_int('M', M)
    _require(k <= M, f"k must not exceed M (got k={k}, M={M})")
    _require(c0 > 0 and c1 > 0, "c0 and c1 must be positive")
    m_star = _ceil(4 * k * beta * math.log(M) / (1 - eps)**2 + 2 * k * B)
    p = 1.0 - M**(1 - beta) - M**(-c1 * beta * eps**2)
    gate = math.log(M) >= c0 / eps**2
    notes = ['sign-ensemble block threshold; c0, c1 are caller-supplied',
             'gate M >= exp(c0/eps^2) ' + ('holds' if gate else 'FAILS')]
    notes.extend(_vacuous_notes(p))
    return BoundReport('block', 'sign',
                       {'beta': beta, 'eps': eps, 'k': k, 'B': B, 'M': M,
                        'c0': c0, 'c1': c1},
                       m_star, p, k * B, {'gate_holds': gate}, tuple(notes))


# -- supporting tail inequalities ----------------------------------------------

def borell_tail(B, t):
    """``P[sqrt(chi^2_B) >= sqrt(B) + t] <= exp(-t^2/2)``."""
    _check_int('B', B)
    _require(t >= 0, f"t must be nonnegative (got {t})")
    return math.exp(-t * t / 2)


def vershynin_tail(t, m, gamma=DEFAULT_GAMMA):
    """``P[sigma_min(Phi_T) <= 1 - theta sqrt(d_T/m) - t] <= exp(-gamma m t^2)``."""
    _require(t >= 0, f"t must be nonnegative (got {t})")
    _require(m > 0 and gamma > 0, "m and gamma must be positive")
    return math.exp(-gamma * m * t * t)


def achlioptas_tail(v_norm, d1):
    """``P[||M v|| >= 1] <= exp(-(||v||^-2 - d1)/4)`` for a ``d1 x d2`` sign
    matrix ``M``; requires ``0 < ||v|| <= sqrt(d1)``. The value exceeds 1
    (no information) when ``||v|| > 1/sqrt(d1)``."""
    _check_int('d1', d1)
    _require(0 < v_norm <= math.sqrt(d1),
             f"need 0 < ||v|| <= sqrt(d1) (got ||v||={v_norm}, d1={d1})")
    return math.exp(-(v_norm**-2 - d1) / 4)


_AUX = {'borell': borell_tail, 'vershynin': vershynin_tail,
        'achlioptas': achlioptas_tail}


def aux_tails(kind, **params):
    """Evaluate a supporting inequality by name: ``borell``, ``vershynin``
    or ``achlioptas``."""
    try:
        fn = _AUX[kind]
    except KeyError:
        raise DomainError(f"unknown inequality {kind!r}; choose from {sorted(_AUX)}")
    return fn(**params)

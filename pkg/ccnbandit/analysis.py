"""
Closed-form quantities used to judge the simulator: concentration
inequalities, the success probability of the initial phase (a lower
bound and two normal approximations), the transient length estimate and
the instantaneous suboptimality bound of tuned epsilon-greedy.

Every function is pure. Probabilities are capped to [0, 1]; a violated
theorem precondition raises :py:class:`ccnbandit.exceptions.DomainError`.
"""
import collections
import logging
import math

import numpy as np
from scipy import special

from . import exceptions

logger = logging.getLogger(__name__)

#: Phi(2) as rounded in the two-sigma rule
TWO_SIGMA_SUCCESS = 0.977

#: Below this |lambda| the Bennett function is evaluated by its series
BENNETT_SERIES_CUTOFF = 1e-3


def _cap(value):
    return min(1.0, max(0.0, value))


def _check_positive(name, value):
    if not value > 0:
        raise exceptions.DomainError('{0} must be > 0, got {1}'.format(name, value))


# Concentration inequalities

def hoeffding_tail(eta, ranges):
    """
    ``P[sum(Y_t) >= eta] <= exp(-2 eta^2 / sum((b_t - a_t)^2))`` for
    independent zero-mean ``Y_t`` with values in ``[a_t, b_t]``
    """
    _check_positive('eta', eta)
    total = 0.0
    for low, high in ranges:
        if high < low:
            raise exceptions.DomainError('range ({0}, {1}) has b < a'.format(low, high))
        total += (high - low) ** 2
    if total == 0:
        return 0.0
    return _cap(math.exp(-2 * eta ** 2 / total))


def bennett_b(lam):
    """
    ``B(lambda) = 2 lambda^-2 ((1 + lambda) ln(1 + lambda) - lambda)``.

    ``B(0+) = 1``, B decreases and ``B(lambda) >= 1 / (1 + lambda / 3)``.
    """
    if lam < 0:
        raise exceptions.DomainError('lambda must be >= 0, got {0}'.format(lam))
    if lam < BENNETT_SERIES_CUTOFF:
        return 1 - lam / 3 + lam ** 2 / 6 - lam ** 3 / 10 + lam ** 4 / 15
    return 2 * ((1 + lam) * math.log1p(lam) - lam) / lam ** 2


def bennett_tail(eta, M, V):
    """
    Bennett's inequality for a sum of independent zero-mean variables
    bounded by ``M`` with total variance ``V``
    """
    _check_positive('eta', eta)
    _check_positive('M', M)
    _check_positive('V', V)
    return _cap(math.exp(-0.5 * eta ** 2 / V * bennett_b(M * eta / V)))


def bernstein_tail(eta, M, V):
    _check_positive('eta', eta)
    _check_positive('M', M)
    _check_positive('V', V)
    return _cap(math.exp(-0.5 * eta ** 2 / (V + M * eta / 3)))


def azuma_tail(lam, increments):
    """
    Azuma's inequality for a martingale whose increments are bounded by
    ``c(s)``: ``exp(-lambda^2 / (2 sum(c(s)^2)))``
    """
    _check_positive('lambda', lam)
    total = 0.0
    for c in increments:
        if c < 0:
            raise exceptions.DomainError('increment bound must be >= 0, got {0}'.format(c))
        total += c ** 2
    if total == 0:
        return 0.0
    return _cap(math.exp(-lam ** 2 / (2 * total)))


def normal_cdf(x):
    return float(special.ndtr(x))


# Initial phase

class ArmGapSpec(object):
    """
    True means and variances of the arms, the best arm, its gaps, the
    maximal delay ``D`` and the initial phase selection probabilities
    ``p_j`` (uniform unless given)
    """

    def __init__(self, means, variances, D=None, probabilities=None):
        if len(means) != len(variances):
            raise ValueError('means and variances differ in length')
        self.means = np.asarray(means, dtype=float)
        self.variances = np.asarray(variances, dtype=float)
        self.K = len(self.means)
        self.D = D
        if probabilities is None:
            probabilities = np.full(self.K, 1.0 / self.K)
        self.probabilities = np.asarray(probabilities, dtype=float)
        if len(self.probabilities) != self.K:
            raise ValueError('one selection probability per arm is required')
        if not math.isclose(float(self.probabilities.sum()), 1.0, abs_tol=1e-9):
            raise ValueError('selection probabilities must sum to 1')
        self.best = int(np.argmin(self.means))
        self.gaps = self.means - self.means[self.best]

    @classmethod
    def from_distributions(cls, distributions, D=None, probabilities=None):
        """
        ``D`` defaults to the largest support; pass it explicitly for
        unbounded laws
        """
        if D is None:
            supports = [d.max_support for d in distributions]
            if all(s is not None for s in supports):
                D = max(supports)
        moments = [d.moments() for d in distributions]
        return cls([m for m, _ in moments], [v for _, v in moments], D=D, probabilities=probabilities)

    @property
    def suboptimal(self):
        return [j for j in range(self.K) if j != self.best]

    @property
    def min_gap(self):
        return float(min(self.gaps[j] for j in self.suboptimal))

    def require_D(self):
        if self.D is None:
            raise exceptions.DomainError('a bounded maximal delay D is required')
        return self.D

    def require_suboptimal(self):
        if not self.suboptimal:
            raise exceptions.DomainError('at least two arms are required')

    def __repr__(self):
        return '<ArmGapSpec K={0} best={1} D={2}>'.format(self.K, self.best, self.D)


def c_coefficient(spec, j):
    """``c_j = D^2 + (gap_j / 2) D + (gap_j / 2) p_* D``"""
    if j == spec.best:
        raise exceptions.DomainError('c_j is only defined for suboptimal arms')
    D = spec.require_D()
    half_gap = spec.gaps[j] / 2
    return float(D ** 2 + half_gap * D + half_gap * spec.probabilities[spec.best] * D)


def _check_t0(spec, t0):
    D = spec.require_D()
    spec.require_suboptimal()
    if t0 <= D:
        raise exceptions.DomainError('t0 must exceed D={0}, got {1}'.format(D, t0))
    return D


def thm1_success_lower_bound(spec, t0):
    """
    Lower bound on the probability that the sample means at ``t0``
    identify the best arm, with uniform initial selection. Each factor is
    clamped at 0 before squaring.
    """
    D = _check_t0(spec, t0)
    K = spec.K
    result = 1.0
    for j in spec.suboptimal:
        c = c_coefficient(spec, j)
        exponent = spec.gaps[j] ** 2 * (t0 - D) ** 2 / (8 * K ** 2 * c ** 2 * t0)
        factor = max(0.0, -math.expm1(-exponent))
        result *= factor ** 2
    return _cap(result)


def _thm2_argument(gap, p, variance, t0, D):
    denominator = 2 * math.sqrt(p * variance + gap ** 2 * p * (1 - p) / 4)
    if denominator == 0:
        return math.inf if gap > 0 else 0.0
    return gap * p * math.sqrt(t0 - D) / denominator


def thm2_success_approx(spec, t0):
    """
    Normal approximation of the success probability for a randomly drawn
    initial phase. Stated for ``p_j = 1/K`` but evaluated with
    ``spec.probabilities``.
    """
    D = _check_t0(spec, t0)
    best = spec.best
    p_best = spec.probabilities[best]
    result = 1.0
    for j in spec.suboptimal:
        gap = spec.gaps[j]
        result *= normal_cdf(_thm2_argument(gap, spec.probabilities[j], spec.variances[j], t0, D))
        result *= normal_cdf(_thm2_argument(gap, p_best, spec.variances[best], t0, D))
    return _cap(result)


def thm3_success_approx_rr(spec, t0):
    """Normal approximation of the success probability for a round-robin initial phase"""
    D = _check_t0(spec, t0)
    best_variance = spec.variances[spec.best]
    result = 1.0
    for j in spec.suboptimal:
        total_variance = 3 * (best_variance + spec.variances[j])
        if total_variance == 0:
            argument = math.inf if spec.gaps[j] > 0 else 0.0
        else:
            argument = spec.gaps[j] * math.sqrt((t0 - D) / total_variance)
        result *= normal_cdf(argument)
    return _cap(result)


TransientEstimate = collections.namedtuple('TransientEstimate', ['unrounded', 'slots', 'success_floor'])


def transient_slots_estimate(spec):
    """
    Initial phase length after which a round-robin phase picks the best
    arm with probability at least ``0.977^(K-1)`` (every normal argument
    reaches 2)
    """
    D = spec.require_D()
    spec.require_suboptimal()
    min_gap = spec.min_gap
    if min_gap <= 0:
        raise exceptions.DomainError('the best arm is not unique')
    worst_variance = max(spec.variances[j] for j in spec.suboptimal)
    unrounded = D + 12 * (spec.variances[spec.best] + worst_variance) / min_gap ** 2
    return TransientEstimate(
        unrounded=float(unrounded),
        slots=int(math.ceil(unrounded)),
        success_floor=TWO_SIGMA_SUCCESS ** (spec.K - 1),
    )


# Tuned epsilon-greedy

class Theorem4Params(object):
    """
    Inputs of the suboptimality bound: ``a > 0``, ``0 < d <= min gap``,
    support in ``[1, D]``, ``K > 1`` arms and slots ``t >= t0 > aK/d^2``
    """

    def __init__(self, a, d, D, K, t0, t=None):
        _check_positive('a', a)
        _check_positive('d', d)
        if D < 1:
            raise exceptions.DomainError('D must be >= 1, got {0}'.format(D))
        if K < 2:
            raise exceptions.DomainError('K must be > 1, got {0}'.format(K))
        self.a = float(a)
        self.d = float(d)
        self.D = D
        self.K = K
        self.t0 = t0
        self.t = t0 if t is None else t
        if not t0 > self.eps0:
            raise exceptions.DomainError(
                't0 must exceed eps0 = aK/d^2 = {0:.6g}, got {1}'.format(self.eps0, t0))
        if self.t < t0:
            raise exceptions.DomainError('t must be >= t0={0}, got {1}'.format(t0, self.t))

    @classmethod
    def from_spec(cls, spec, a, t0, t=None, d=None):
        """Use the scenario's smallest gap as ``d`` unless a smaller one is given"""
        min_gap = spec.min_gap
        d = min_gap if d is None else d
        if d > min_gap:
            raise exceptions.DomainError('d={0} exceeds the smallest gap {1:.6g}'.format(d, min_gap))
        return cls(a, d, spec.require_D(), spec.K, t0, t)

    @property
    def eps0(self):
        return self.a * self.K / self.d ** 2

    def at(self, t):
        return self.__class__(self.a, self.d, self.D, self.K, self.t0, t)

    def __repr__(self):
        return '<Theorem4Params a={0} d={1} D={2} K={3} t0={4} t={5}>'.format(
            self.a, self.d, self.D, self.K, self.t0, self.t)


def _thm4_log_terms(params, t):
    a, d, D, K = params.a, params.d, params.D, params.K
    # log of aK / (t d^2 e^(1/2)), negative on the domain
    log_x = math.log(a * K / d ** 2) - np.log(t) - 0.5
    first = (math.log(2 * D * a / d ** 2) + np.log(-log_x)
             + 3 * a / (14 * d ** 2) * log_x)
    second = (math.log(16 * D ** 3 / d ** 2) + (D + 1) / 8.0
              + a / (8.0 * D ** 2) * log_x)
    third = math.log(a / d ** 2) - np.log(t)
    return first, second, third


def thm4_suboptimal_prob_bound(params):
    """
    Bound on the probability that tuned epsilon-greedy sends the
    interest of slot ``params.t`` to a given suboptimal arm. Power terms
    are summed in log space.
    """
    log_total = special.logsumexp(_thm4_log_terms(params, float(params.t)))
    return _cap(float(np.exp(log_total)))


def thm4_bound_curve(params, t_grid):
    """The same bound over an array of slots, each >= ``params.t0``"""
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < params.t0):
        raise exceptions.DomainError('every t must be >= t0={0}'.format(params.t0))
    first, second, third = _thm4_log_terms(params, t)
    log_total = np.logaddexp(np.logaddexp(first, second), third)
    return np.minimum(1.0, np.exp(log_total))

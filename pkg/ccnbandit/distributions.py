"""
Per-router reply delay laws.

Every law is discrete, counted in slots, and puts all of its mass on
delays >= 1: a reply can never be used in the slot its interest was sent.
Laws are immutable once built; the probability table they carry is the
single source for pmf, cdf, moments and inverse-CDF sampling.
"""
import bisect
import logging
import math

import numpy as np
import persisting_theory
from scipy import special

from . import exceptions
from . import fields
from . import models

logger = logging.getLogger(__name__)

#: Untruncated tables stop at the first delay whose remaining tail mass is below this
TAIL_EPSILON = 1e-12

#: Explicit tables summing to 1 within this are rescaled to sum exactly to 1
NORMALIZATION_TOLERANCE = 1e-6


class Kinds(persisting_theory.Registry):
    def prepare_name(self, data, name):
        data.registry_name = name
        return name

kinds = Kinds()
register = kinds.register


class DelayDistribution(object):
    """
    A delay law described by a probability table starting at ``start``.

    ``bounded`` laws (truncated and explicit tables) have exactly the
    support of their table and their cdf reaches 1.0 exactly at the last
    entry. Unbounded laws keep a finite table for sampling only; their
    pmf and cdf are exact everywhere.
    """
    registry_name = None
    bounded = True

    def __init__(self, start, probabilities):
        table = np.array(probabilities, dtype=float)
        if table.ndim != 1 or not len(table):
            raise exceptions.InvalidDistribution('empty probability table')
        if not np.all(np.isfinite(table)) or np.any(table < 0):
            raise exceptions.InvalidDistribution('probabilities must be finite and nonnegative')
        if start < 1:
            raise exceptions.InvalidDistribution(
                'delays start at 1 slot, got support starting at {0}'.format(start))

        nonzero = np.flatnonzero(table)
        if not len(nonzero):
            raise exceptions.InvalidDistribution('probability table has no mass')
        # strip leading and trailing zeros so the table spans the exact support
        table = table[nonzero[0]:nonzero[-1] + 1]
        start = int(start + nonzero[0])

        cumulative = np.cumsum(table)
        if self.bounded:
            cumulative[-1] = 1.0
        table.setflags(write=False)
        cumulative.setflags(write=False)

        self.start = start
        self.table = table
        self.cumulative = cumulative
        self._cumulative_list = cumulative.tolist()

    @property
    def min_support(self):
        return self.start

    @property
    def max_support(self):
        """Largest delay with positive mass, None if unbounded"""
        if not self.bounded:
            return None
        return self.start + len(self.table) - 1

    @property
    def table_end(self):
        return self.start + len(self.table) - 1

    def support(self):
        return np.arange(self.start, self.table_end + 1)

    def pmf(self, x):
        if x < self.start:
            return 0.0
        if x <= self.table_end:
            return float(self.table[x - self.start])
        if self.bounded:
            return 0.0
        return self._tail_pmf(x)

    def cdf(self, x):
        if x < self.start:
            return 0.0
        if x <= self.table_end:
            return float(self.cumulative[x - self.start])
        if self.bounded:
            return 1.0
        return self._tail_cdf(x)

    def moments(self):
        support = self.support()
        mean = math.fsum(support * self.table)
        variance = math.fsum((support - mean) ** 2 * self.table)
        return mean, variance

    @property
    def mean(self):
        return self.moments()[0]

    @property
    def variance(self):
        return self.moments()[1]

    @property
    def std(self):
        return math.sqrt(self.variance)

    def ppf(self, u):
        """
        Inverse cdf over the table for uniforms ``u`` in [0, 1), works on
        arrays
        """
        index = np.searchsorted(self.cumulative, u, side='right')
        return self.start + np.minimum(index, len(self.table) - 1)

    def sample(self, rng):
        u = rng.random()
        index = bisect.bisect_right(self._cumulative_list, u)
        if index >= len(self._cumulative_list):
            index = len(self._cumulative_list) - 1
        return self.start + index

    def sample_many(self, rng, size):
        return self.ppf(rng.random(size))

    def truncate(self, D_max):
        """
        Return the conditional law given X <= D_max
        """
        if D_max < self.start:
            raise exceptions.InvalidTruncation(
                'cannot truncate at {0}: minimum support is {1}'.format(D_max, self.start))
        if self.bounded and D_max >= self.max_support:
            return self
        kept = self.table[:D_max - self.start + 1]
        if not kept.sum() > 0:
            raise exceptions.InvalidTruncation('no mass at or below {0}'.format(D_max))
        return ExplicitTable.from_support(self.start, kept / kept.sum())

    def as_dict(self):
        return {'kind': self.registry_name}

    def __repr__(self):
        return '<{0}: {1}>'.format(self.__class__.__name__, ', '.join(
            '{0}={1}'.format(k, v) for k, v in sorted(self.as_dict().items()) if k != 'kind'))

    def _tail_pmf(self, x):
        raise NotImplementedError

    def _tail_cdf(self, x):
        raise NotImplementedError


def negative_binomial_log_pmf(k, p, r):
    """
    log P[K = k] for the number of failures K before the r-th success
    """
    k = np.asarray(k, dtype=float)
    return (special.gammaln(k + r) - special.gammaln(k + 1) - special.gammaln(r)
            + r * math.log(p) + k * math.log1p(-p))


def _check_nb_parameters(shift, p, r):
    if int(shift) != shift or shift < 1:
        raise exceptions.InvalidDistribution(
            'shift must be an integer >= 1 so that replies never arrive in the sending slot, got {0}'.format(shift))
    if not 0 < p < 1:
        raise exceptions.InvalidDistribution('p must lie in (0, 1), got {0}'.format(p))
    if int(r) != r or r < 1:
        raise exceptions.InvalidDistribution('r must be a positive integer, got {0}'.format(r))


def _tail_cut(p, r):
    """
    Smallest number of failures k with P[K > k] < TAIL_EPSILON
    """
    mean = r * (1 - p) / p
    std = math.sqrt(r * (1 - p)) / p
    k_max = int(mean + 20 * std) + 16
    while special.betainc(k_max + 1, r, 1 - p) >= TAIL_EPSILON:
        k_max *= 2
    ks = np.arange(k_max + 1)
    survival = special.betainc(ks + 1, r, 1 - p)
    return int(np.argmax(survival < TAIL_EPSILON))


@register(name='shifted-negative-binomial')
class ShiftedNegativeBinomial(DelayDistribution):
    """
    ``shift`` slots of propagation plus the number of failures before the
    r-th success of Bernoulli(p) trials:
    ``P[shift + k] = C(k + r - 1, k) p^r (1 - p)^k``.
    """
    bounded = False

    def __init__(self, shift, p, r):
        _check_nb_parameters(shift, p, r)
        self.shift = int(shift)
        self.p = float(p)
        self.r = int(r)
        ks = np.arange(self._table_length())
        super(ShiftedNegativeBinomial, self).__init__(
            self.shift, np.exp(negative_binomial_log_pmf(ks, self.p, self.r)))

    def _table_length(self):
        return _tail_cut(self.p, self.r) + 1

    def _tail_pmf(self, x):
        return float(np.exp(negative_binomial_log_pmf(x - self.shift, self.p, self.r)))

    def _tail_cdf(self, x):
        return float(special.betainc(self.r, x - self.shift + 1, self.p))

    def moments(self):
        q = 1 - self.p
        return self.shift + self.r * q / self.p, self.r * q / self.p ** 2

    def truncate(self, D_max):
        if D_max < self.shift:
            raise exceptions.InvalidTruncation(
                'cannot truncate at {0}: minimum support is {1}'.format(D_max, self.shift))
        return TruncatedShiftedNegativeBinomial(self.shift, self.p, self.r, D_max)

    def as_dict(self):
        return {'kind': self.registry_name, 'shift': self.shift, 'p': self.p, 'r': self.r}


@register(name='truncated-shifted-negative-binomial')
class TruncatedShiftedNegativeBinomial(ShiftedNegativeBinomial):
    """
    The shifted negative binomial conditioned on X <= D_max
    """
    bounded = True

    def __init__(self, shift, p, r, truncation):
        _check_nb_parameters(shift, p, r)
        if truncation < shift:
            raise exceptions.InvalidTruncation(
                'cannot truncate at {0}: minimum support is {1}'.format(truncation, shift))
        self.truncation = int(truncation)
        self.shift = int(shift)
        self.p = float(p)
        self.r = int(r)
        ks = np.arange(self.truncation - self.shift + 1)
        # renormalize in log space so large r or small p cannot underflow the whole table
        log_table = negative_binomial_log_pmf(ks, self.p, self.r)
        log_mass = special.logsumexp(log_table)
        DelayDistribution.__init__(self, self.shift, np.exp(log_table - log_mass))

    def moments(self):
        return DelayDistribution.moments(self)

    def truncate(self, D_max):
        if D_max >= self.truncation:
            return self
        return self.__class__(self.shift, self.p, self.r, D_max)

    def as_dict(self):
        d = super(TruncatedShiftedNegativeBinomial, self).as_dict()
        d['truncation'] = self.truncation
        return d


@register(name='explicit-table')
class ExplicitTable(DelayDistribution):
    """
    An arbitrary law given as probabilities of delays 1, 2, ..., D, or as
    a ``{delay: probability}`` mapping
    """

    def __init__(self, probabilities):
        if isinstance(probabilities, dict):
            if not probabilities:
                raise exceptions.InvalidDistribution('empty probability table')
            if min(probabilities) < 1:
                raise exceptions.InvalidDistribution('delays start at 1 slot')
            values = np.zeros(int(max(probabilities)))
            for delay, probability in probabilities.items():
                values[int(delay) - 1] = probability
        else:
            values = np.array(probabilities, dtype=float)
        total = values.sum() if values.size else 0.0
        if not abs(total - 1.0) <= NORMALIZATION_TOLERANCE:
            raise exceptions.InvalidDistribution(
                'probabilities must sum to 1, got {0!r}'.format(total))
        super(ExplicitTable, self).__init__(1, values / total)

    @classmethod
    def from_support(cls, start, probabilities):
        return cls(np.concatenate([np.zeros(start - 1), probabilities]))

    def as_dict(self):
        return {'kind': self.registry_name, 'probabilities': self.table.tolist(), 'start': self.start}


def shifted_negative_binomial(shift, p, r, truncation=None):
    if truncation is None:
        return ShiftedNegativeBinomial(shift, p, r)
    return TruncatedShiftedNegativeBinomial(shift, p, r, truncation)


def explicit_table(probabilities):
    return ExplicitTable(probabilities)


def three_routers(truncation=None):
    """
    The three routers of the reference numerical example: propagation
    delay 2, r = 10 and p = 0.8, 0.7, 0.6 (mean delays 4.5, 6.29, 8.67)
    """
    return [shifted_negative_binomial(2, p, 10, truncation=truncation) for p in (0.8, 0.7, 0.6)]


NB_KINDS = ('shifted-negative-binomial', 'truncated-shifted-negative-binomial')


class ArmConfig(models.Model):
    """
    One router's delay law as declared in a configuration file
    """
    kind = fields.ChoiceField(
        ('shifted-negative-binomial', 'truncated-shifted-negative-binomial', 'explicit-table'),
        default='shifted-negative-binomial')
    name = fields.CharField(required=False)
    shift = fields.IntegerField(min_value=1, required=False)
    p = fields.FloatField(min_value=0.0, max_value=1.0, open_interval=True, required=False)
    r = fields.IntegerField(min_value=1, required=False)
    truncation = fields.IntegerField(min_value=1, required=False)
    probabilities = fields.ListField(fields.FloatField(min_value=0.0), min_length=1, required=False)

    class Meta:
        name = 'arm'

    def clean(self):
        if self.kind in NB_KINDS:
            for key in ('shift', 'p', 'r'):
                if getattr(self, key) is None:
                    raise exceptions.ValidationError(key, 'this field is required for {0}'.format(self.kind))
            if self.kind == 'truncated-shifted-negative-binomial' and self.truncation is None:
                raise exceptions.ValidationError('truncation', 'this field is required for {0}'.format(self.kind))
        elif self.probabilities is None:
            raise exceptions.ValidationError('probabilities', 'this field is required for explicit-table')
        try:
            self.build()
        except exceptions.InvalidTruncation as e:
            raise exceptions.ValidationError('truncation', str(e))
        except exceptions.InvalidDistribution as e:
            raise exceptions.ValidationError('probabilities' if self.kind == 'explicit-table' else 'kind', str(e))

    def build(self, truncation=None):
        """
        The :py:class:`DelayDistribution` declared here. ``truncation`` (a
        scenario-wide D) applies when the arm declares none of its own.
        """
        truncation = self.truncation if self.truncation is not None else truncation
        if self.kind in NB_KINDS:
            return shifted_negative_binomial(self.shift, self.p, self.r, truncation=truncation)
        distribution = explicit_table(self.probabilities)
        if truncation is not None:
            distribution = distribution.truncate(truncation)
        return distribution

"""
Interest forwarding policies: epsilon-greedy, tuned epsilon-greedy and
UCB, each preceded by an initial phase of ``t0`` slots driven by a
round-robin or uniformly random strategy.

Statistics only cover interests whose replies have arrived; the
simulator calls :py:meth:`PolicyState.record_reply` at the arrival slot.
"""
import logging
import math

import persisting_theory

from . import exceptions
from . import fields
from . import models

logger = logging.getLogger(__name__)

DEFAULT_EPS = 0.1
DEFAULT_L = 2.0

ALGORITHM_CHOICES = ('eps-greedy', 'tuned-eps-greedy', 'ucb')
INIT_STRATEGY_CHOICES = ('round-robin', 'uniform-random')


class PolicyConfig(models.Model):
    algorithm = fields.ChoiceField(ALGORITHM_CHOICES)
    t0 = fields.IntegerField(min_value=1, help_text='initial phase length in slots')
    eps = fields.FloatField(min_value=0.0, max_value=1.0, required=False)
    eps0 = fields.FloatField(min_value=0.0, open_interval=True, required=False)
    L = fields.FloatField(min_value=0.0, open_interval=True, required=False)
    init_strategy = fields.ChoiceField(INIT_STRATEGY_CHOICES, default='round-robin')

    class Meta:
        name = 'policy'

    def clean(self):
        if self.algorithm == 'eps-greedy':
            if self.eps is None:
                self.eps = DEFAULT_EPS
            if self.eps >= 1:
                raise exceptions.ValidationError('eps', 'must be < 1, got {0}'.format(self.eps))
        elif self.algorithm == 'tuned-eps-greedy':
            if self.eps0 is None:
                # eps0 = aK/d^2 needs the gap d, which only the user knows
                raise exceptions.ValidationError('eps0', 'required for tuned-eps-greedy')
            if self.eps0 >= self.t0:
                raise exceptions.ValidationError(
                    'eps0', 'tuned-eps-greedy requires eps0 in (0, t0), got eps0={0} with t0={1}'.format(
                        self.eps0, self.t0))
        elif self.algorithm == 'ucb':
            if self.L is None:
                self.L = DEFAULT_L

    @property
    def label(self):
        return self.algorithm


class ArmStats(object):
    """
    Per-arm counters: interests sent, interests answered and observed,
    and the sum of observed delays
    """
    __slots__ = ('sent', 'answered', 'delay_sum')

    def __init__(self, sent=0, answered=0, delay_sum=0):
        self.sent = sent
        self.answered = answered
        self.delay_sum = delay_sum

    @property
    def pending(self):
        return self.sent - self.answered

    def copy(self):
        return ArmStats(self.sent, self.answered, self.delay_sum)

    def __eq__(self, other):
        return (isinstance(other, ArmStats)
                and (self.sent, self.answered, self.delay_sum)
                == (other.sent, other.answered, other.delay_sum))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return '<ArmStats sent={0} answered={1} delay_sum={2}>'.format(
            self.sent, self.answered, self.delay_sum)


def average_delay(stats):
    """Sample mean of observed delays, None while nothing was answered"""
    if stats.answered == 0:
        return None
    return float(stats.delay_sum) / stats.answered


class Algorithms(persisting_theory.Registry):
    def prepare_name(self, data, name):
        data.registry_name = name
        return name

algorithms = Algorithms()
register = algorithms.register


class Algorithm(object):
    def __init__(self, policy):
        self.policy = policy

    def index(self, stats, t):
        return average_delay(stats)

    def exploration_prob(self, t):
        return 0.0


@register(name='eps-greedy')
class EpsilonGreedy(Algorithm):
    def exploration_prob(self, t):
        return self.policy.eps


@register(name='tuned-eps-greedy')
class TunedEpsilonGreedy(Algorithm):
    def exploration_prob(self, t):
        if t <= 0:
            return 1.0
        return min(1.0, self.policy.eps0 / t)


@register(name='ucb')
class UpperConfidenceBound(Algorithm):
    """
    Delays are costs, so the confidence width is subtracted: the index is
    a lower confidence bound on the mean delay
    """
    def index(self, stats, t):
        mean = average_delay(stats)
        if mean is None:
            return None
        return mean - math.sqrt(self.policy.L * math.log(t) / stats.answered)


def get_algorithm(policy):
    return algorithms[policy.algorithm](policy)


def index(policy, stats, t):
    return get_algorithm(policy).index(stats, t)


def exploration_prob(policy, t):
    return get_algorithm(policy).exploration_prob(t)


class InitStrategies(persisting_theory.Registry):
    def prepare_name(self, data, name):
        data.registry_name = name
        return name

init_strategies = InitStrategies()
register_strategy = init_strategies.register


@register_strategy(name='round-robin')
class RoundRobin(object):
    """Cycle through the order drawn when the state was created"""
    def choose(self, state, rng):
        arm = state.order[state.cursor % len(state.order)]
        state.cursor += 1
        return arm


@register_strategy(name='uniform-random')
class UniformRandom(object):
    def choose(self, state, rng):
        return int(rng.integers(len(state.stats)))


class PolicyState(object):
    """
    Everything a policy learned so far. ``t`` is the slot of the next
    decision and always equals the total number of interests sent.
    """

    def __init__(self, n_arms, order=None):
        self.stats = [ArmStats() for _ in range(n_arms)]
        self.t = 0
        self.order = list(order) if order is not None else list(range(n_arms))
        self.cursor = 0
        self.explored = False
        self._algorithm = None

    @classmethod
    def start(cls, n_arms, rng):
        """
        A fresh state whose round-robin order (and so its first arm) is
        drawn uniformly at random
        """
        return cls(n_arms, order=[int(arm) for arm in rng.permutation(n_arms)])

    def algorithm_for(self, policy):
        if self._algorithm is None or self._algorithm.policy is not policy:
            self._algorithm = get_algorithm(policy)
        return self._algorithm

    @property
    def sent(self):
        return sum(s.sent for s in self.stats)

    @property
    def answered(self):
        return sum(s.answered for s in self.stats)

    @property
    def pending(self):
        return sum(s.pending for s in self.stats)

    def indices(self, policy):
        algorithm = self.algorithm_for(policy)
        t = max(self.t, 1)
        return [algorithm.index(stats, t) for stats in self.stats]

    def record_send(self, arm, t):
        if t != self.t:
            raise exceptions.ConsistencyError(
                'send for slot {0} while the state is at slot {1}'.format(t, self.t))
        self.stats[arm].sent += 1
        self.t = t + 1

    def record_reply(self, arm, delay):
        stats = self.stats[arm]
        if stats.answered >= stats.sent:
            raise exceptions.ConsistencyError(
                'reply on arm {0} without a pending interest'.format(arm))
        if delay < 1:
            raise exceptions.ConsistencyError('reply delay {0} < 1 slot'.format(delay))
        stats.answered += 1
        stats.delay_sum += delay


def select_arm(state, policy, rng):
    """
    Pick the arm for slot ``state.t``.

    Before ``t0`` the init strategy decides. Afterwards, with
    :py:func:`exploration_prob` a uniformly random arm is drawn; otherwise
    unobserved arms are forced first (in round-robin order) and then the
    smallest index wins, ties going to the lowest arm id.
    """
    n_arms = len(state.stats)
    if not n_arms:
        raise exceptions.ConfigError(
            'empty arm set', [exceptions.ValidationError('arms', 'at least one arm is required')])

    t = state.t
    if t < policy.t0:
        state.explored = True
        return init_strategies[policy.init_strategy]().choose(state, rng)

    algorithm = state.algorithm_for(policy)
    prob = algorithm.exploration_prob(t)
    if prob > 0 and rng.random() < prob:
        state.explored = True
        return int(rng.integers(n_arms))

    state.explored = False
    for offset in range(n_arms):
        position = (state.cursor + offset) % n_arms
        arm = state.order[position]
        if state.stats[arm].answered == 0:
            state.cursor = position + 1
            return arm

    best_arm, best_index = 0, None
    for arm, stats in enumerate(state.stats):
        value = algorithm.index(stats, t)
        if best_index is None or value < best_index:
            best_arm, best_index = arm, value
    return best_arm

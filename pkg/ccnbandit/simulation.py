"""
Slot-based forwarding simulator.

At every slot exactly one interest is sent. Its delay is drawn at send
time and the reply becomes visible to the policy at slot
``sent_at + delay``: a reply arriving at slot ``a`` is usable by the
decision of slot ``t`` iff ``a <= t``. Replies still in flight at the
horizon are dropped.
"""
import collections
import functools
import heapq
import itertools
import logging

import numpy as np
from concurrent.futures import ProcessPoolExecutor

from . import __version__, RNG_ALGORITHM
from . import adapters
from . import aggregates
from . import exceptions
from . import fields
from . import models
from . import policies
from . import utils
from .distributions import ArmConfig

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 10000
DEFAULT_REPLICATIONS = 200

CUT_ANSWERED = 'answered'
CUT_COMPLETE = 'complete'


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(master, index):
    """
    Seed of replication ``index``: numpy's SeedSequence hash of
    ``(master, index)``, so replications are independent yet reproducible
    """
    sequence = np.random.SeedSequence(entropy=master, spawn_key=(index,))
    return int(sequence.generate_state(1, np.uint64)[0])


class ScenarioConfig(models.Model):
    """
    One policy run against a set of arms
    """
    arms = fields.ListField(fields.ModelField(ArmConfig), min_length=2)
    policy = fields.ModelField(policies.PolicyConfig)
    horizon = fields.IntegerField(min_value=1, default=DEFAULT_HORIZON)
    replications = fields.IntegerField(min_value=1, default=DEFAULT_REPLICATIONS)
    seed = fields.IntegerField(min_value=0, default=0)
    truncation = fields.IntegerField(min_value=1, required=False,
                                     help_text='D applied to every arm without its own truncation')

    class Meta:
        name = 'scenario'

    @classmethod
    def from_dict(cls, data):
        return adapters.ConfigAdapter().parse(data, cls)

    def clean(self):
        if self.horizon < self.policy.t0:
            raise exceptions.ValidationError(
                'horizon', 'must be >= t0 ({0}), got {1}'.format(self.policy.t0, self.horizon))
        for i, arm in enumerate(self.arms):
            try:
                arm.build(truncation=self.truncation)
            except exceptions.InvalidDistribution as e:
                raise exceptions.ValidationError('arms.{0}'.format(i), str(e))
        self._validated = True

    def ensure_valid(self):
        """
        Raise :py:class:`ccnbandit.exceptions.ConfigError` unless this
        config went through the adapter (or passes it now)
        """
        if getattr(self, '_validated', False):
            return self
        checked = self.from_dict(self.as_dict())
        self._validated = True
        return checked

    @property
    def distributions(self):
        try:
            return self._distributions
        except AttributeError:
            self._distributions = [arm.build(truncation=self.truncation) for arm in self.arms]
            return self._distributions

    @property
    def n_arms(self):
        return len(self.arms)

    @property
    def means(self):
        return [d.moments()[0] for d in self.distributions]

    @property
    def variances(self):
        return [d.moments()[1] for d in self.distributions]

    @property
    def best_arm(self):
        """Arm with the smallest mean delay, lowest id on ties"""
        return int(np.argmin(self.means))

    @property
    def tied_best(self):
        means = np.asarray(self.means)
        return int(np.sum(np.isclose(means, means.min(), rtol=0, atol=1e-12))) > 1

    @property
    def gaps(self):
        means = np.asarray(self.means)
        return means - means[self.best_arm]

    @property
    def max_delay(self):
        """The largest possible delay D, None when some arm is unbounded"""
        bounds = [d.max_support for d in self.distributions]
        if any(b is None for b in bounds):
            return None
        return max(bounds)

    @property
    def digest(self):
        return utils.hash_data({
            'config': self.as_dict(),
            'rng': RNG_ALGORITHM,
            'version': __version__,
        })


PendingReply = collections.namedtuple('PendingReply', ['arrives_at', 'sent_at', 'arm', 'delay'])


class RunTrace(object):
    """
    Everything recorded by one run: per-slot decisions and delays,
    pending/answered totals after each slot, final statistics and the
    optional per-slot index snapshot (taken before each decision)
    """

    def __init__(self, arms, explored, delays, pending, answered, stats,
                 best_arm, seed, digest, indices=None):
        self.arms = arms
        self.explored = explored
        self.delays = delays
        self.pending = pending
        self.answered = answered
        self.stats = stats
        self.best_arm = best_arm
        self.seed = seed
        self.digest = digest
        self.indices = indices

    @property
    def horizon(self):
        return len(self.arms)

    @property
    def n_arms(self):
        return len(self.stats)

    def __len__(self):
        return self.horizon

    def records(self):
        for slot, (arm, explored) in enumerate(zip(self.arms, self.explored)):
            yield slot, int(arm), bool(explored)

    @property
    def counts(self):
        """Cumulative sends per arm, shape ``horizon x K``"""
        one_hot = np.zeros((self.horizon, self.n_arms), dtype=np.int64)
        one_hot[np.arange(self.horizon), self.arms] = 1
        return np.cumsum(one_hot, axis=0)

    @property
    def optimal(self):
        return self.arms == self.best_arm

    def fraction_optimal_curve(self):
        return np.cumsum(self.optimal) / np.arange(1, self.horizon + 1, dtype=float)


def run(config, seed, record_indices=False):
    """
    Simulate ``config.horizon`` slots with the given seed. Pure function of
    ``(config, seed)``.
    """
    config.ensure_valid()
    policy = config.policy
    distributions = config.distributions
    n_arms = len(distributions)
    horizon = config.horizon

    rng = make_rng(seed)
    state = policies.PolicyState.start(n_arms, rng)
    in_flight = []

    arms = np.empty(horizon, dtype=np.int64)
    explored = np.empty(horizon, dtype=bool)
    delays = np.empty(horizon, dtype=np.int64)
    pending = np.empty(horizon, dtype=np.int64)
    answered = np.empty(horizon, dtype=np.int64)
    indices = np.full((horizon, n_arms), np.nan) if record_indices else None
    answered_total = 0

    for t in range(horizon):
        while in_flight and in_flight[0].arrives_at <= t:
            reply = heapq.heappop(in_flight)
            if reply.arrives_at < reply.sent_at + 1:
                raise exceptions.ConsistencyError(
                    'reply sent at {0} delivered at {1}'.format(reply.sent_at, reply.arrives_at))
            state.record_reply(reply.arm, reply.delay)
            answered_total += 1

        if record_indices:
            indices[t] = [np.nan if v is None else v for v in state.indices(policy)]

        arm = policies.select_arm(state, policy, rng)
        delay = distributions[arm].sample(rng)
        state.record_send(arm, t)
        heapq.heappush(in_flight, PendingReply(t + delay, t, arm, delay))

        arms[t] = arm
        explored[t] = state.explored
        delays[t] = delay
        pending[t] = len(in_flight)
        answered[t] = answered_total

    return RunTrace(
        arms=arms,
        explored=explored,
        delays=delays,
        pending=pending,
        answered=answered,
        stats=[s.copy() for s in state.stats],
        best_arm=config.best_arm,
        seed=seed,
        digest=config.digest,
        indices=indices,
    )


def fraction_optimal(result, t):
    """
    Share of the interests of slots ``[0, t]`` sent to the optimal arm, for
    a single :py:class:`RunTrace` or averaged over a
    :py:class:`MonteCarloResult`
    """
    if t < 0 or t >= result.horizon:
        raise IndexError('slot {0} outside [0, {1})'.format(t, result.horizon))
    if isinstance(result, MonteCarloResult):
        return float(result.mean_fraction_optimal[t])
    return float(np.sum(result.optimal[:t + 1])) / (t + 1)


class MonteCarloResult(object):
    """
    Per-slot curves averaged over replications
    """

    def __init__(self, mean_fraction_optimal, stderr_fraction_optimal, suboptimal_frequency,
                 mean_suboptimal_sends, mean_regret, replications, seed, digest, policy):
        self.mean_fraction_optimal = mean_fraction_optimal
        self.stderr_fraction_optimal = stderr_fraction_optimal
        self.suboptimal_frequency = suboptimal_frequency
        self.mean_suboptimal_sends = mean_suboptimal_sends
        self.mean_regret = mean_regret
        self.replications = replications
        self.seed = seed
        self.digest = digest
        self.policy = policy

    @property
    def horizon(self):
        return len(self.mean_fraction_optimal)

    def rows(self):
        for slot in range(self.horizon):
            yield (
                slot,
                float(self.mean_fraction_optimal[slot]),
                float(self.stderr_fraction_optimal[slot]),
                float(self.suboptimal_frequency[slot]),
                float(self.mean_suboptimal_sends[slot]),
                float(self.mean_regret[slot]),
            )


def _replicate(config, seed):
    trace = run(config, seed)
    return trace.arms


def replication_curves(config, arms):
    """
    Per-slot curves of one replication: cumulative fraction optimal, the
    suboptimal indicator, cumulative suboptimal sends and cumulative regret
    """
    optimal = arms == config.best_arm
    suboptimal = ~optimal
    return {
        'fraction_optimal': np.cumsum(optimal) / np.arange(1, len(arms) + 1, dtype=float),
        'suboptimal': suboptimal,
        'suboptimal_sends': np.cumsum(suboptimal),
        'regret': np.cumsum(config.gaps[arms]),
    }


def _replications(config, seeds, workers):
    if workers and workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            chunksize = max(1, len(seeds) // (4 * workers))
            for arms in executor.map(functools.partial(_replicate, config), seeds, chunksize=chunksize):
                yield arms
    else:
        for seed in seeds:
            yield _replicate(config, seed)


CURVE_AGGREGATES = (
    aggregates.Mean('fraction_optimal'),
    aggregates.StdErr('fraction_optimal'),
    aggregates.Mean('suboptimal'),
    aggregates.Mean('suboptimal_sends'),
    aggregates.Mean('regret'),
)


def monte_carlo(config, workers=1, replications=None):
    """
    Run every replication of ``config`` and aggregate per slot. Replication
    ``i`` uses ``derive_seed(config.seed, i)``; each finished replication is
    folded into running moments in replication order, so the result does
    not depend on the number of workers and memory does not grow with the
    replication count.
    """
    config.ensure_valid()
    replications = replications or config.replications
    seeds = [derive_seed(config.seed, i) for i in range(replications)]
    logger.info('Running %d replication(s) of %s over %d slots',
                replications, config.policy.label, config.horizon)

    moments = collections.defaultdict(aggregates.RunningMoments)
    for i, arms in enumerate(_replications(config, seeds, workers)):
        for name, values in replication_curves(config, arms).items():
            moments[name].add(values)
        logger.debug('replication %d/%d done', i + 1, replications)
    results = aggregates.collect(moments, CURVE_AGGREGATES)

    return MonteCarloResult(
        mean_fraction_optimal=results['fraction_optimal__mean'],
        stderr_fraction_optimal=results['fraction_optimal__stderr'],
        suboptimal_frequency=results['suboptimal__mean'],
        mean_suboptimal_sends=results['suboptimal_sends__mean'],
        mean_regret=results['regret__mean'],
        replications=replications,
        seed=config.seed,
        digest=config.digest,
        policy=config.policy.label,
    )


class BestArmEstimate(collections.namedtuple(
        'BestArmEstimate', ['probability', 'half_width', 'replications', 'successes'])):
    """Success frequency with its 95% normal-approximation half-width"""

    @property
    def upper(self):
        return self.probability + self.half_width

    @property
    def lower(self):
        return self.probability - self.half_width


def empirical_best_arm_prob(config, t0=None, replications=None, cut=CUT_ANSWERED,
                            init_strategy=None, D=None, seed=None, confidence=0.95):
    """
    Probability that, after an initial phase of ``t0`` slots, the arm with
    the smallest sample mean is the true best arm.

    ``cut='answered'`` averages every reply usable at slot ``t0``.
    ``cut='complete'`` only counts interests sent before ``t0 - D``, all of
    which are answered by ``t0``. A replication where some arm has no
    usable reply counts as a failure; ties go to the lowest arm id.
    """
    config.ensure_valid()
    t0 = t0 or config.policy.t0
    replications = replications or config.replications
    init_strategy = init_strategy or config.policy.init_strategy
    distributions = config.distributions
    n_arms = len(distributions)
    if cut == CUT_COMPLETE:
        D = D or config.max_delay
        if D is None:
            raise exceptions.DomainError('the complete cut needs a bounded delay D')
    elif cut != CUT_ANSWERED:
        raise ValueError('unknown cut {0!r}'.format(cut))

    seed = config.seed if seed is None else seed
    rng = make_rng(derive_seed(seed, t0))
    slots = np.arange(t0)

    if init_strategy == 'round-robin':
        orders = rng.permuted(np.tile(np.arange(n_arms), (replications, 1)), axis=1)
        arms = orders[:, slots % n_arms]
    else:
        arms = rng.integers(n_arms, size=(replications, t0))

    u = rng.random((replications, t0))
    delays = np.zeros((replications, t0), dtype=np.int64)
    for arm, distribution in enumerate(distributions):
        mask = arms == arm
        delays[mask] = distribution.ppf(u[mask])

    usable = slots + delays <= t0
    if cut == CUT_COMPLETE:
        usable &= slots < t0 - D

    sums = np.zeros((replications, n_arms))
    counts = np.zeros((replications, n_arms), dtype=np.int64)
    for arm in range(n_arms):
        mask = usable & (arms == arm)
        sums[:, arm] = np.where(mask, delays, 0).sum(axis=1)
        counts[:, arm] = mask.sum(axis=1)

    defined = counts > 0
    with np.errstate(divide='ignore', invalid='ignore'):
        means = np.where(defined, sums / np.maximum(counts, 1), np.inf)
    success = defined.all(axis=1) & (np.argmin(means, axis=1) == config.best_arm)

    half_width = aggregates.HalfWidth('success', confidence=confidence).aggregate(success.astype(float))
    return BestArmEstimate(
        probability=float(success.mean()),
        half_width=float(half_width),
        replications=replications,
        successes=int(success.sum()),
    )

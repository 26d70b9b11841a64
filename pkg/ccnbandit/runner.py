"""
Executes experiment commands and writes their CSV artifacts.

Every CSV starts with ``# key: value`` comment lines (schema version,
digest, seed, package version) followed by a header row. Nothing
time-dependent is written, so a rerun with the same seed reproduces the
files byte for byte.
"""
import collections
import csv
import io
import logging
import math
import os

import numpy as np

from . import __version__
from . import analysis
from . import config
from . import exceptions
from . import simulation
from . import utils
from .policies import PolicyConfig

logger = logging.getLogger(__name__)

CURVES_COLUMNS = ('slot', 'policy', 'mean_fraction_optimal', 'stderr', 'replications',
                  'mean_suboptimal_sends', 'mean_regret')
TRACE_COLUMNS = ('slot', 'policy', 'arm', 'explored', 'delay', 'pending', 'answered', 'optimal')
SWEEP_COLUMNS = ('slot', 'policy', 't0', 'init_strategy', 'mean_fraction_optimal', 'stderr')
BOUNDS_COLUMNS = ('grid_value', 'init_strategy', 'thm1_bound', 'thm2_approx', 'thm3_approx',
                  'empirical', 'empirical_ci_halfwidth', 'cut', 'replications', 'status')
TRANSIENT_COLUMNS = ('variances', 'D', 'unrounded', 'slots', 'success_floor',
                     'empirical', 'empirical_ci_halfwidth', 'status')
THEOREM4_COLUMNS = ('t', 'bound', 'bound_all_suboptimal', 'empirical_suboptimal_freq',
                    'a', 'd', 'eps0', 't0', 'status')
DISTRIBUTIONS_COLUMNS = ('arm', 'delay', 'pmf', 'cdf')

STATUS_OK = 'ok'


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return '1' if value else '0'
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ''
        return '{0:.12g}'.format(float(value))
    return str(value)


def invalid(reason):
    return 'invalid:{0}'.format(str(reason).replace(',', ';'))


def write_csv(path, columns, rows, metadata):
    """
    Write ``rows`` under a header, after one comment line per metadata
    entry (sorted by key)
    """
    directory = os.path.dirname(path)
    if directory and not os.path.isdir(directory):
        os.makedirs(directory)
    with io.open(path, 'w', encoding='utf-8', newline='') as f:
        for key, value in sorted(metadata.items()):
            f.write(u'# {0}: {1}\n'.format(key, value))
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        count = 0
        for row in rows:
            writer.writerow([format_value(v) for v in row])
            count += 1
    logger.info('Wrote %d row(s) to %s', count, path)
    return path


ValidationReport = collections.namedtuple('ValidationReport', ['ok', 'lines', 'warnings', 'errors'])


class ExperimentRunner(object):
    """
    Runs the commands of an :py:class:`ccnbandit.config.ExperimentSpec`.
    Empirical best-arm estimates are memoized in ``cache`` under
    ``identifier:estimate digest:best-arm:<parameters hash>``, so changing
    the grids or the policies of an experiment reuses what was already
    estimated for the same arms and seed.
    """

    def __init__(self, cache=None, identifier='ccnbandit', workers=None):
        self.cache = cache
        self.identifier = identifier
        self.workers = workers
        if self.cache is not None and not self.identifier:
            raise ValueError('You must provide a unique identifier if you want to use caching')

    def execute(self, action, spec, out_dir=None):
        try:
            handler = getattr(self, 'handle_{0}'.format(action.replace('-', '_')))
        except AttributeError:
            raise ValueError('Unsupported {0} action'.format(action))
        if action == 'validate':
            return handler(spec)
        return handler(spec, spec.output_directory(out_dir))

    def metadata(self, spec, **extra):
        data = {
            'digest': spec.digest,
            'experiment': spec.name,
            'schema': spec.schema_version,
            'seed': spec.seed,
            'version': __version__,
        }
        data.update(extra)
        return data

    def get_workers(self, spec):
        return self.workers or spec.workers

    # Simulation

    def handle_simulate(self, spec, out_dir):
        if not spec.policies:
            raise exceptions.ConfigError(
                'nothing to simulate', [exceptions.ValidationError('policies', 'this field is required')])
        results = []
        for scenario in spec.scenarios():
            result = simulation.monte_carlo(scenario, workers=self.get_workers(spec))
            logger.info('%s: final fraction optimal %.4f', scenario.policy.label,
                        result.mean_fraction_optimal[-1])
            results.append(result)

        def rows():
            for result in results:
                for slot, mean, stderr, _, sends, regret in result.rows():
                    yield slot, result.policy, mean, stderr, result.replications, sends, regret

        paths = [write_csv(os.path.join(out_dir, 'curves.csv'), CURVES_COLUMNS, rows(),
                           self.metadata(spec, command='simulate'))]
        paths.extend(self.write_traces(spec, out_dir))
        return paths

    def write_traces(self, spec, out_dir):
        paths = []
        count = spec.output.traces if spec.output else 0
        scenarios = spec.scenarios() if count else []
        for i in range(min(count, spec.replications)):
            seed = simulation.derive_seed(spec.seed, i)
            traces = [simulation.run(scenario, seed) for scenario in scenarios]

            def rows(traces=traces):
                for scenario, trace in zip(scenarios, traces):
                    for t in range(trace.horizon):
                        yield (t, scenario.policy.label, trace.arms[t], trace.explored[t],
                               trace.delays[t], trace.pending[t], trace.answered[t],
                               trace.arms[t] == trace.best_arm)

            path = os.path.join(out_dir, 'trace_{0}.csv'.format(seed))
            paths.append(write_csv(path, TRACE_COLUMNS, rows(),
                                   self.metadata(spec, command='simulate', replication=i, run_seed=seed)))
        return paths

    def handle_sweep_t0(self, spec, out_dir):
        if not spec.sweep or not spec.policies:
            raise exceptions.ConfigError(
                'nothing to sweep', [exceptions.ValidationError('sweep', 'sweep and policies are required')])
        curves = []
        for policy in spec.policies:
            for t0, strategy in spec.sweep_points():
                scenario = spec.scenario(spec.sweep_policy(policy, t0, strategy))
                result = simulation.monte_carlo(scenario, workers=self.get_workers(spec))
                logger.info('%s t0=%d %s: final fraction optimal %.4f', policy.label, t0, strategy,
                            result.mean_fraction_optimal[-1])
                curves.append((policy.label, t0, strategy, result))

        def rows():
            for label, t0, strategy, result in curves:
                for slot in range(result.horizon):
                    yield (slot, label, t0, strategy, result.mean_fraction_optimal[slot],
                           result.stderr_fraction_optimal[slot])

        return [write_csv(os.path.join(out_dir, 'sweep_t0.csv'), SWEEP_COLUMNS, rows(),
                          self.metadata(spec, command='sweep-t0'))]

    # Bounds

    def get_cache_key(self, spec, params):
        return ':'.join([self.identifier, spec.estimate_digest, 'best-arm', utils.hash_data(params)])

    def best_arm_estimate(self, spec, t0, strategy, replications, cut):
        """
        Empirical success probability of an initial phase of ``t0`` slots
        followed by a pure sample-mean choice
        """
        params = {'t0': t0, 'strategy': strategy, 'replications': replications, 'cut': cut}

        def compute():
            policy = PolicyConfig(algorithm='eps-greedy', t0=t0, eps=0.0, init_strategy=strategy)
            scenario = spec.scenario(policy, horizon=t0, replications=replications)
            return simulation.empirical_best_arm_prob(
                scenario, t0=t0, replications=replications, cut=cut, init_strategy=strategy,
                D=self.max_delay(spec))

        if self.cache is None:
            return compute()
        value = self.cache.get_or_set(self.get_cache_key(spec, params), lambda: list(compute()))
        return simulation.BestArmEstimate(*value)

    def max_delay(self, spec):
        if spec.truncation is not None:
            return spec.truncation
        supports = [d.max_support for d in spec.distributions]
        if any(s is None for s in supports):
            return None
        return max(supports)

    def gap_spec(self, spec, truncated=True):
        if truncated:
            distributions = spec.distributions
        else:
            distributions = [arm.build() for arm in spec.arms]
        return analysis.ArmGapSpec.from_distributions(distributions, D=self.max_delay(spec))

    def handle_bounds(self, spec, out_dir):
        bounds = spec.bounds or config.BoundsConfig()
        gap_spec = self.gap_spec(spec)
        paths = []

        if bounds.t0_grid:
            rows = []
            for t0 in bounds.t0_grid:
                for strategy in bounds.strategies:
                    rows.append(self.bounds_row(spec, bounds, gap_spec, t0, strategy))
            paths.append(write_csv(os.path.join(out_dir, 'bounds.csv'), BOUNDS_COLUMNS, rows,
                                   self.metadata(spec, command='bounds', D=gap_spec.D)))

        if bounds.transient:
            rows = [self.transient_row(spec, bounds, label, self.gap_spec(spec, truncated=truncated))
                    for label, truncated in (('truncated', True), ('untruncated', False))]
            paths.append(write_csv(os.path.join(out_dir, 'transient.csv'), TRANSIENT_COLUMNS, rows,
                                   self.metadata(spec, command='bounds', D=gap_spec.D)))

        if bounds.theorem4:
            paths.append(write_csv(os.path.join(out_dir, 'theorem4.csv'), THEOREM4_COLUMNS,
                                   self.theorem4_rows(spec, bounds.theorem4, gap_spec),
                                   self.metadata(spec, command='bounds', D=gap_spec.D)))
        return paths

    def bounds_row(self, spec, bounds, gap_spec, t0, strategy):
        values = []
        status = STATUS_OK
        for function in (analysis.thm1_success_lower_bound,
                         analysis.thm2_success_approx,
                         analysis.thm3_success_approx_rr):
            try:
                values.append(function(gap_spec, t0))
            except exceptions.DomainError as e:
                values.append(None)
                status = invalid(e)
        try:
            estimate = self.best_arm_estimate(spec, t0, strategy, bounds.replications, bounds.cut)
            empirical, half_width = estimate.probability, estimate.half_width
        except exceptions.DomainError as e:
            empirical = half_width = None
            status = invalid(e)
        return [t0, strategy] + values + [empirical, half_width, bounds.cut, bounds.replications, status]

    def transient_row(self, spec, bounds, label, gap_spec):
        try:
            estimate = analysis.transient_slots_estimate(gap_spec)
        except exceptions.DomainError as e:
            return [label, gap_spec.D, None, None, None, None, None, invalid(e)]
        empirical = self.best_arm_estimate(
            spec, estimate.slots, 'round-robin', bounds.replications, simulation.CUT_COMPLETE)
        logger.info('Transient estimate with %s variances: %.2f slots, success >= %.4f (empirical %.4f)',
                    label, estimate.unrounded, estimate.success_floor, empirical.probability)
        return [label, gap_spec.D, estimate.unrounded, estimate.slots, estimate.success_floor,
                empirical.probability, empirical.half_width, STATUS_OK]

    def theorem4_params(self, spec, settings, gap_spec):
        D = gap_spec.require_D()
        a = settings.a if settings.a is not None else 8.0 * D ** 2
        d = settings.d if settings.d is not None else gap_spec.min_gap
        t0 = settings.t0
        if t0 is None:
            t0 = int(math.floor(a * gap_spec.K / d ** 2)) + 1
        return analysis.Theorem4Params.from_spec(gap_spec, a, t0, d=d)

    def theorem4_rows(self, spec, settings, gap_spec):
        try:
            params = self.theorem4_params(spec, settings, gap_spec)
        except exceptions.DomainError as e:
            return [[None, None, None, None, settings.a, settings.d, None, settings.t0, invalid(e)]]

        t_grid = utils.unique_everseen(int(round(params.t0 * m)) for m in settings.multipliers)
        bound = analysis.thm4_bound_curve(params, t_grid)
        empirical = [None] * len(t_grid)
        if settings.simulate:
            policy = PolicyConfig(algorithm='tuned-eps-greedy', t0=params.t0, eps0=params.eps0,
                                  init_strategy='uniform-random')
            scenario = spec.scenario(policy, horizon=max(t_grid) + 1, replications=settings.replications)
            result = simulation.monte_carlo(scenario, workers=self.get_workers(spec))
            empirical = [result.suboptimal_frequency[t] for t in t_grid]

        rows = []
        for t, value, frequency in zip(t_grid, bound, empirical):
            rows.append([t, value, min(1.0, (params.K - 1) * value), frequency,
                         params.a, params.d, params.eps0, params.t0, STATUS_OK])
        return rows

    # Inspection

    def handle_distributions(self, spec, out_dir):
        def rows():
            for i, (arm, distribution) in enumerate(zip(spec.arms, spec.distributions)):
                mean, variance = distribution.moments()
                logger.info('%s: mean %.4f, std %.4f, support [%d, %s]', arm.name or i, mean,
                            math.sqrt(variance), distribution.min_support,
                            distribution.max_support or 'inf')
                for delay in distribution.support():
                    yield arm.name or i, delay, distribution.pmf(delay), distribution.cdf(delay)

        return [write_csv(os.path.join(out_dir, 'distributions.csv'), DISTRIBUTIONS_COLUMNS, rows(),
                          self.metadata(spec, command='distributions'))]

    def handle_validate(self, spec):
        """
        Dry run: per-arm moments, the best arm and the theorem
        preconditions that hold or fail for this experiment
        """
        lines = []
        warnings = []
        errors = []
        distributions = spec.distributions
        moments = [d.moments() for d in distributions]
        names = [arm.name or 'arm-{0}'.format(i) for i, arm in enumerate(spec.arms)]

        lines.append('experiment: {0}'.format(spec.name))
        lines.append('digest: {0}'.format(spec.digest))
        for name, distribution, (mean, variance) in zip(names, distributions, moments):
            lines.append('arm.{0}: kind={1} mean={2:.4f} std={3:.4f} variance={4:.4f} support=[{5}, {6}]'.format(
                name, distribution.registry_name, mean, math.sqrt(variance), variance,
                distribution.min_support, distribution.max_support or 'inf'))

        means = np.array([m for m, _ in moments])
        best = int(np.argmin(means))
        lines.append('best_arm: {0} (index {1})'.format(names[best], best))
        if int(np.sum(np.isclose(means, means[best], rtol=0, atol=1e-12))) > 1:
            warnings.append('arms: several arms share the best mean, theorems assume a unique best arm')

        D = self.max_delay(spec)
        lines.append('D: {0}'.format(D if D is not None else 'unbounded'))
        if D is None:
            warnings.append('truncation: delays are unbounded, theorem preconditions need a maximal delay D')

        gap_spec = analysis.ArmGapSpec.from_distributions(distributions, D=D)
        for i, policy in enumerate(spec.policies or []):
            lines.append('policies.{0}: {1} t0={2} init={3}'.format(
                i, policy.label, policy.t0, policy.init_strategy))
            if D is not None and policy.t0 <= D:
                warnings.append('policies.{0}.t0: t0={1} <= D={2}, initial phase bounds do not apply'.format(
                    i, policy.t0, D))

        bounds = spec.bounds
        if bounds and bounds.t0_grid and D is not None:
            for t0 in bounds.t0_grid:
                if t0 <= D:
                    warnings.append('bounds.t0_grid: t0={0} <= D={1}, rows will be marked invalid'.format(t0, D))
        if bounds and bounds.theorem4:
            try:
                params = self.theorem4_params(spec, bounds.theorem4, gap_spec)
                lines.append('theorem4: a={0:.6g} d={1:.6g} eps0={2:.6g} t0={3}'.format(
                    params.a, params.d, params.eps0, params.t0))
            except exceptions.DomainError as e:
                errors.append('bounds.theorem4: {0}'.format(e))

        return ValidationReport(ok=not errors, lines=lines, warnings=warnings, errors=errors)

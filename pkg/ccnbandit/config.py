"""
Experiment documents: what to simulate, which bounds to evaluate and
where to write the results.

A document is a YAML or JSON mapping validated by
:py:class:`ExperimentSpec`; the presets reproducing the reference experiments
ship in ``ccnbandit/presets``.
"""
import logging
import os

from . import __version__, RNG_ALGORITHM
from . import adapters
from . import exceptions
from . import fields
from . import models
from . import parsers
from . import simulation
from . import utils
from .distributions import ArmConfig
from .policies import INIT_STRATEGY_CHOICES, PolicyConfig

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

OUT_DIR_ENV = 'CCNBANDIT_OUT_DIR'
DEFAULT_OUT_DIR = 'results'
CACHE_DIR_ENV = 'CCNBANDIT_CACHE_DIR'
CACHE_SUBDIR = '.cache'

PRESETS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'presets')

CUT_CHOICES = (simulation.CUT_ANSWERED, simulation.CUT_COMPLETE)


class SweepConfig(models.Model):
    t0 = fields.ListField(fields.IntegerField(min_value=1), min_length=1)
    strategies = fields.ListField(
        fields.ChoiceField(INIT_STRATEGY_CHOICES), min_length=1,
        default=lambda: list(INIT_STRATEGY_CHOICES))

    class Meta:
        name = 'sweep'


class Theorem4Config(models.Model):
    """
    Tuned epsilon-greedy suboptimality check. ``a`` defaults to ``8 D^2``,
    ``d`` to the smallest gap and ``t0`` to the first slot above
    ``aK/d^2``; the bound is evaluated at ``t0 * multiplier``.
    """
    a = fields.FloatField(min_value=0.0, open_interval=True, required=False)
    d = fields.FloatField(min_value=0.0, open_interval=True, required=False)
    t0 = fields.IntegerField(min_value=1, required=False)
    multipliers = fields.ListField(
        fields.FloatField(min_value=1.0), min_length=1, default=lambda: [2.0, 10.0, 100.0])
    replications = fields.IntegerField(min_value=1, default=200)
    simulate = fields.BooleanField(default=True, help_text='estimate the empirical suboptimal frequency')

    class Meta:
        name = 'theorem4'


class BoundsConfig(models.Model):
    t0_grid = fields.ListField(fields.IntegerField(min_value=1), min_length=1, required=False)
    strategies = fields.ListField(
        fields.ChoiceField(INIT_STRATEGY_CHOICES), min_length=1,
        default=lambda: list(INIT_STRATEGY_CHOICES))
    replications = fields.IntegerField(min_value=1, default=20000)
    cut = fields.ChoiceField(CUT_CHOICES, default=simulation.CUT_COMPLETE)
    transient = fields.BooleanField(default=True)
    theorem4 = fields.ModelField(Theorem4Config, required=False)

    class Meta:
        name = 'bounds'


class OutputConfig(models.Model):
    directory = fields.CharField(required=False)
    traces = fields.IntegerField(
        min_value=0, default=0, help_text='number of replications written as trace_<seed>.csv')

    class Meta:
        name = 'output'


class ExperimentSpec(models.Model):
    name = fields.CharField(default='experiment')
    description = fields.CharField(required=False)
    arms = fields.ListField(fields.ModelField(ArmConfig), min_length=2)
    policies = fields.ListField(fields.ModelField(PolicyConfig), min_length=1, required=False)
    horizon = fields.IntegerField(min_value=1, default=simulation.DEFAULT_HORIZON)
    replications = fields.IntegerField(min_value=1, default=simulation.DEFAULT_REPLICATIONS)
    seed = fields.IntegerField(min_value=0, default=0)
    workers = fields.IntegerField(min_value=1, default=1)
    truncation = fields.IntegerField(min_value=1, required=False)
    sweep = fields.ModelField(SweepConfig, required=False)
    bounds = fields.ModelField(BoundsConfig, required=False)
    output = fields.ModelField(OutputConfig, default=OutputConfig)
    schema_version = fields.IntegerField(min_value=1, default=SCHEMA_VERSION)

    class Meta:
        name = 'experiment'

    @classmethod
    def from_dict(cls, data):
        return adapters.ConfigAdapter().parse(data, cls)

    def clean(self):
        if self.schema_version > SCHEMA_VERSION:
            raise exceptions.ValidationError(
                'schema_version', 'unsupported, this release reads up to {0}'.format(SCHEMA_VERSION))
        for i, arm in enumerate(self.arms):
            try:
                arm.build(truncation=self.truncation)
            except exceptions.InvalidDistribution as e:
                raise exceptions.ValidationError('arms.{0}'.format(i), str(e))
        for i, policy in enumerate(self.policies or []):
            if self.horizon < policy.t0:
                raise exceptions.ValidationError(
                    'horizon', 'must be >= t0 of policies.{0} ({1}), got {2}'.format(
                        i, policy.t0, self.horizon))
            for t0, strategy in self.sweep_points():
                try:
                    self.sweep_policy(policy, t0, strategy)
                except exceptions.ConfigError as e:
                    raise exceptions.ValidationError(
                        'sweep.t0', 'policies.{0} with t0={1}: {2}'.format(
                            i, t0, '; '.join(e.lines())))
                if self.horizon < t0:
                    raise exceptions.ValidationError(
                        'sweep.t0', 'must be <= horizon ({0}), got {1}'.format(self.horizon, t0))

    def sweep_points(self):
        if not self.sweep:
            return []
        return [(t0, strategy) for t0 in self.sweep.t0 for strategy in self.sweep.strategies]

    def sweep_policy(self, policy, t0, strategy):
        """``policy`` with another initial phase, validated again"""
        data = policy.as_dict()
        data.update(t0=t0, init_strategy=strategy)
        return adapters.ConfigAdapter().parse(data, PolicyConfig)

    def scenario(self, policy, **kwargs):
        """
        The :py:class:`ccnbandit.simulation.ScenarioConfig` running
        ``policy`` on this experiment's arms
        """
        values = dict(
            arms=self.arms,
            policy=policy,
            horizon=self.horizon,
            replications=self.replications,
            seed=self.seed,
            truncation=self.truncation,
        )
        values.update(kwargs)
        scenario = simulation.ScenarioConfig(**values)
        try:
            scenario.clean()
        except exceptions.ValidationError as e:
            raise exceptions.ConfigError('invalid scenario', [e])
        return scenario

    def scenarios(self):
        return [self.scenario(policy) for policy in self.policies or []]

    @property
    def distributions(self):
        return [arm.build(truncation=self.truncation) for arm in self.arms]

    @property
    def digest(self):
        return utils.hash_data({
            'config': self.as_dict(),
            'rng': RNG_ALGORITHM,
            'version': __version__,
        })

    @property
    def estimate_digest(self):
        """
        Digest of what an initial-phase estimate depends on besides its own
        parameters: the arms, the truncation and the seed
        """
        return utils.hash_data({
            'arms': [arm.as_dict() for arm in self.arms],
            'truncation': self.truncation,
            'seed': self.seed,
            'rng': RNG_ALGORITHM,
            'version': __version__,
        })

    def output_directory(self, override=None):
        """
        ``override`` (the command line) wins, then ``output.directory``,
        then ``$CCNBANDIT_OUT_DIR/<name>``
        """
        if override:
            return override
        if self.output and self.output.directory:
            return self.output.directory
        return os.path.join(os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR, self.name)

    def cache_directory(self, override=None):
        """
        $CCNBANDIT_CACHE_DIR when set, otherwise a hidden directory inside
        the output directory
        """
        return os.environ.get(CACHE_DIR_ENV) or os.path.join(self.output_directory(override), CACHE_SUBDIR)


def apply_overrides(data, overrides, section_overrides=None):
    """
    Set every dotted path of ``overrides``. Paths of ``section_overrides``
    are only set when their parent section is present in ``data``.
    """
    for path, value in sorted((section_overrides or {}).items()):
        if value is not None and utils.has_parent(data, path):
            utils.set_path(data, path, value)
            logger.debug('override %s=%r', path, value)
    for path, value in sorted((overrides or {}).items()):
        if value is None:
            continue
        utils.set_path(data, path, value)
        logger.debug('override %s=%r', path, value)
    return data


def load_experiment(path, overrides=None, section_overrides=None):
    """
    Parse the document at ``path``, apply dotted ``overrides`` such as
    ``{'bounds.replications': 100}`` and validate the result
    """
    data = parsers.load_document(path)
    data = apply_overrides(data, overrides, section_overrides)
    spec = ExperimentSpec.from_dict(data)
    logger.info('Loaded experiment %s from %s (digest %s)', spec.name, path, spec.digest)
    return spec


def available_presets():
    return sorted(
        os.path.splitext(filename)[0]
        for filename in os.listdir(PRESETS_DIR)
        if filename.endswith('.yaml'))


def preset_path(name):
    path = os.path.join(PRESETS_DIR, '{0}.yaml'.format(name))
    if not os.path.exists(path):
        raise exceptions.UnknownPreset(
            'unknown preset {0!r}, available: {1}'.format(name, ', '.join(available_presets())))
    return path


def load_preset(name, overrides=None, section_overrides=None):
    return load_experiment(preset_path(name), overrides, section_overrides)

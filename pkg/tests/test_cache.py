#!/usr/bin/env python
# -*- coding: utf-8 -*-
import io
import os
import unittest

import mock
import numpy as np

from ccnbandit import caches
from ccnbandit import config
from ccnbandit import exceptions
from ccnbandit import runner
from ccnbandit import utils
from ccnbandit.simulation import BestArmEstimate

from .mixins import THREE_ROUTER_ARMS, TemporaryDirectoryMixin

ESTIMATE = BestArmEstimate(probability=0.97, half_width=0.01, replications=100, successes=97)


def cached_spec(**kwargs):
    data = {
        'name': 'cached',
        'arms': THREE_ROUTER_ARMS,
        'truncation': 15,
        'seed': 1,
    }
    data.update(kwargs)
    return config.ExperimentSpec.from_dict(data)


class TestRunnerCache(unittest.TestCase):
    def setUp(self):
        self.cache = caches.DummyCache()
        self.runner = runner.ExperimentRunner(cache=self.cache, identifier='test')
        self.spec = cached_spec()

    def test_runner_uses_identifier_digest_and_hashed_parameters_for_cache_key(self):
        params = {'t0': 68, 'strategy': 'round-robin', 'replications': 100, 'cut': 'complete'}
        expected = ':'.join(['test', self.spec.estimate_digest, 'best-arm', utils.hash_data(params)])
        self.assertEqual(self.runner.get_cache_key(self.spec, params), expected)

    def test_cache_key_ignores_what_the_estimate_does_not_depend_on(self):
        params = {'t0': 68, 'strategy': 'round-robin', 'replications': 100, 'cut': 'complete'}
        other = cached_spec(name='renamed', horizon=99, bounds={'t0_grid': [20, 40]})
        self.assertEqual(self.runner.get_cache_key(self.spec, params), self.runner.get_cache_key(other, params))
        for changed in (cached_spec(seed=2), cached_spec(truncation=20), cached_spec(arms=THREE_ROUTER_ARMS[:2])):
            self.assertNotEqual(self.runner.get_cache_key(self.spec, params),
                                self.runner.get_cache_key(changed, params))

    def test_runner_requires_an_identifier_to_cache(self):
        with self.assertRaises(ValueError):
            runner.ExperimentRunner(cache=self.cache, identifier='')

    def test_estimates_are_computed_once(self):
        with mock.patch('ccnbandit.simulation.empirical_best_arm_prob', return_value=ESTIMATE) as m:
            first = self.runner.best_arm_estimate(self.spec, 68, 'round-robin', 100, 'complete')
            second = self.runner.best_arm_estimate(self.spec, 68, 'round-robin', 100, 'complete')
            self.assertEqual(m.call_count, 1)
            self.assertEqual(first, ESTIMATE)
            self.assertEqual(second, ESTIMATE)
            self.assertIsInstance(second, BestArmEstimate)
            self.runner.best_arm_estimate(self.spec, 68, 'uniform-random', 100, 'complete')
            self.assertEqual(m.call_count, 2)
        self.assertEqual(len(self.cache), 2)
        self.assertEqual(self.cache.hits, 1)

    def test_estimate_arguments(self):
        with mock.patch('ccnbandit.simulation.empirical_best_arm_prob', return_value=ESTIMATE) as m:
            self.runner.best_arm_estimate(self.spec, 68, 'uniform-random', 100, 'answered')
        scenario = m.call_args[0][0]
        self.assertEqual(scenario.horizon, 68)
        self.assertEqual(scenario.policy.eps, 0.0)
        self.assertEqual(m.call_args[1], {
            't0': 68, 'replications': 100, 'cut': 'answered', 'init_strategy': 'uniform-random', 'D': 15})

    def test_runner_without_cache(self):
        uncached = runner.ExperimentRunner()
        with mock.patch('ccnbandit.simulation.empirical_best_arm_prob', return_value=ESTIMATE) as m:
            uncached.best_arm_estimate(self.spec, 68, 'round-robin', 100, 'complete')
            uncached.best_arm_estimate(self.spec, 68, 'round-robin', 100, 'complete')
        self.assertEqual(m.call_count, 2)


class TestDummyCache(unittest.TestCase):

    def setUp(self):
        self.cache = caches.DummyCache()

    def test_can_store_value(self):
        self.cache.set('key', 'value')
        self.assertEqual(self.cache.get('key'), 'value')

    def test_can_get_or_default(self):
        self.assertEqual(self.cache.get('key', 'default'), 'default')
        self.assertEqual(self.cache.misses, 1)

    def test_reraise(self):
        with self.assertRaises(exceptions.NotInCache):
            self.cache.get('key', reraise=True)

    def test_can_get_or_set(self):
        r = self.cache.get_or_set('key', 'value')
        self.assertEqual(r, 'value')
        self.assertEqual(self.cache.get_or_set('key', 'other'), 'value')

    def test_can_pass_callable_to_set(self):
        f = lambda: 'yolo'

        r = self.cache.get_or_set('key', f)
        self.assertEqual(r, 'yolo')
        self.assertEqual(self.cache.get('key'), 'yolo')

    def test_callable_is_not_called_on_a_hit(self):
        self.cache.set('key', 1)
        f = mock.Mock(return_value=2)
        self.assertEqual(self.cache.get_or_set('key', f), 1)
        f.assert_not_called()

    def test_clear(self):
        self.cache.set('key', 'value')
        self.cache.clear()
        self.assertEqual(len(self.cache), 0)


class TestFileCache(TemporaryDirectoryMixin):

    def setUp(self):
        super(TestFileCache, self).setUp()
        self.cache = caches.FileCache(self.path('cache'))

    def test_directory_is_created_on_first_write(self):
        self.assertFalse(os.path.exists(self.path('cache')))
        self.assertEqual(len(self.cache), 0)
        self.cache.set('key', [0.5, 2])
        self.assertTrue(os.path.isdir(self.path('cache')))
        self.assertEqual(os.listdir(self.path('cache')), [os.path.basename(self.cache.path('key'))])

    def test_values_survive_a_new_instance(self):
        self.cache.set('key', [0.97, 0.01, 100, 97])
        other = caches.FileCache(self.path('cache'))
        self.assertEqual(other.get('key'), [0.97, 0.01, 100, 97])
        self.assertEqual(other.hits, 1)
        self.assertIsNone(other.get('missing'))
        self.assertEqual(other.misses, 1)

    def test_numpy_scalars_are_stored_as_numbers(self):
        self.cache.set('key', [np.float64(0.25), np.int64(3)])
        self.assertEqual(caches.FileCache(self.path('cache')).get('key'), [0.25, 3])

    def test_entry_with_another_key_is_a_miss(self):
        self.cache.set('key', 1)
        with mock.patch.object(caches.FileCache, 'path', return_value=self.cache.path('key')):
            with self.assertRaises(exceptions.NotInCache):
                self.cache.get('other', reraise=True)

    def test_unreadable_entry_is_a_miss(self):
        self.cache.set('key', 1)
        with io.open(self.cache.path('key'), 'w', encoding='utf-8') as f:
            f.write(u'{"key": "key", "val')
        self.assertIsNone(self.cache.get('key'))
        self.assertEqual(self.cache.get_or_set('key', 2), 2)
        self.assertEqual(caches.FileCache(self.path('cache')).get('key'), 2)

    def test_clear(self):
        self.cache.set('a', 1)
        self.cache.set('b', 2)
        self.assertEqual(len(self.cache), 2)
        self.cache.clear()
        self.assertEqual(len(self.cache), 0)
        self.assertIsNone(self.cache.get('a'))

    def test_estimates_are_reused_by_another_runner(self):
        spec = cached_spec()
        with mock.patch('ccnbandit.simulation.empirical_best_arm_prob', return_value=ESTIMATE) as m:
            first = runner.ExperimentRunner(cache=self.cache).best_arm_estimate(
                spec, 68, 'round-robin', 100, 'complete')
            second = runner.ExperimentRunner(cache=caches.FileCache(self.path('cache'))).best_arm_estimate(
                spec, 68, 'round-robin', 100, 'complete')
        self.assertEqual(m.call_count, 1)
        self.assertEqual(first, second)
        self.assertIsInstance(second, BestArmEstimate)


class TestCacheDirectory(unittest.TestCase):

    def test_defaults_to_a_hidden_directory_in_the_output_directory(self):
        spec = cached_spec()
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(spec.cache_directory('out'), os.path.join('out', '.cache'))
            self.assertEqual(spec.cache_directory(), os.path.join('results', 'cached', '.cache'))

    def test_environment_wins(self):
        with mock.patch.dict(os.environ, {config.CACHE_DIR_ENV: '/tmp/estimates'}):
            self.assertEqual(cached_spec().cache_directory('out'), '/tmp/estimates')

"""
Memoization for expensive Monte Carlo estimates, in memory or in a
directory of JSON files shared by successive invocations.
"""
import io
import json
import logging
import os

from . import exceptions
from . import utils

logger = logging.getLogger(__name__)


class Cache(object):
    def __init__(self):
        self.hits = 0
        self.misses = 0

    def get(self, key, default=None, reraise=False):
        """
        Return the value stored under ``key``, or ``default`` when missing.

        :param key: the key to query
        :type key: str
        :param default: returned if the key is not cached
        :param reraise: raise :py:class:`ccnbandit.exceptions.NotInCache`
            instead of returning ``default``
        :type reraise: bool

        .. code-block:: python

            cache.set('ccnbandit:3f2a...:best-arm:9c1e...', [0.9731, 0.0022, 20000, 19462])

            cache.get('ccnbandit:3f2a...:best-arm:9c1e...')
            >>> [0.9731, 0.0022, 20000, 19462]
        """
        try:
            value = self._get(key)
        except exceptions.NotInCache:
            self.misses += 1
            if reraise:
                raise
            return default
        self.hits += 1
        logger.debug('cache hit for %s', key)
        return value

    def set(self, key, value):
        """
        Store ``value`` under ``key``. Callables are evaluated first, so
        the computation can be handed over lazily.
        """
        if hasattr(value, '__call__'):
            value = value()
        self._set(key, value)
        return value

    def get_or_set(self, key, value):
        try:
            return self.get(key, reraise=True)
        except exceptions.NotInCache:
            return self.set(key, value)

    def clear(self):
        raise NotImplementedError()

    def _get(self, key):
        raise NotImplementedError()

    def _set(self, key, value):
        raise NotImplementedError()


class DummyCache(Cache):
    """A process-local dict"""

    def __init__(self):
        self._data = {}
        super(DummyCache, self).__init__()

    def __len__(self):
        return len(self._data)

    def clear(self):
        self._data.clear()

    def _set(self, key, value):
        self._data[key] = value

    def _get(self, key):
        try:
            return self._data[key]
        except KeyError:
            raise exceptions.NotInCache(key)


class FileCache(Cache):
    """
    One JSON file per key under ``directory``, named after a hash of the
    key. Values must be JSON serializable; the directory is created on the
    first write.
    """
    suffix = '.json'

    def __init__(self, directory):
        self.directory = directory
        super(FileCache, self).__init__()

    def path(self, key):
        return os.path.join(self.directory, utils.hash_data(key, length=40) + self.suffix)

    def entries(self):
        if not os.path.isdir(self.directory):
            return []
        return [name for name in os.listdir(self.directory) if name.endswith(self.suffix)]

    def __len__(self):
        return len(self.entries())

    def clear(self):
        for name in self.entries():
            os.remove(os.path.join(self.directory, name))

    def _set(self, key, value):
        if not os.path.isdir(self.directory):
            os.makedirs(self.directory)
        path = self.path(key)
        partial = path + '.partial'
        with io.open(partial, 'w', encoding='utf-8') as f:
            f.write(utils.canonical_json({'key': key, 'value': value}))
        os.replace(partial, path)

    def _get(self, key):
        path = self.path(key)
        try:
            with io.open(path, encoding='utf-8') as f:
                entry = json.load(f)
        except (IOError, OSError):
            raise exceptions.NotInCache(key)
        except ValueError:
            logger.warning('Ignoring unreadable cache entry %s', path)
            raise exceptions.NotInCache(key)
        if not isinstance(entry, dict) or entry.get('key') != key:
            raise exceptions.NotInCache(key)
        return entry['value']

import re
import json
import hashlib

import six

from . import exceptions


def set_path(data, path, value):
    """
    Set a dotted ``path`` such as ``bounds.replications`` inside nested
    dictionaries, creating intermediate mappings as needed
    """
    parts = path.split('.')
    node = data
    for part in parts[:-1]:
        child = node.get(part)
        if child is None:
            child = node[part] = {}
        elif not isinstance(child, dict):
            raise exceptions.ValidationError(part, 'expected a mapping')
        node = child
    node[parts[-1]] = value
    return data


def has_parent(data, path):
    """Whether the mapping holding the last part of ``path`` exists"""
    node = data
    for part in path.split('.')[:-1]:
        if not isinstance(node, dict) or not isinstance(node.get(part), dict):
            return False
        node = node[part]
    return isinstance(node, dict)


def unique_everseen(seq):
    """Solution found here : http://stackoverflow.com/questions/480214/how-do-you-remove-duplicates-from-a-list-in-python-whilst-preserving-order"""
    seen = set()
    seen_add = seen.add
    return [x for x in seq if not (x in seen or seen_add(x))]


def to_snake_case(s):
    s = s.replace('-', '_')
    # single letter symbols (L, D) keep their case
    if len(s) == 1:
        return s
    s1 = re.sub('(.)([A-Z][a-z]+)', r'\1_\2', s)
    return re.sub('([a-z0-9])([A-Z])', r'\1_\2', s1).lower()


def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(',', ':'), default=_json_default)


def _json_default(value):
    # numpy scalars and arrays
    if hasattr(value, 'tolist'):
        return value.tolist()
    raise TypeError('{0!r} is not JSON serializable'.format(value))


def hash_data(data, length=20):
    if not isinstance(data, six.string_types):
        data = canonical_json(data)
    return hashlib.sha512(data.encode('utf-8')).hexdigest()[:length]

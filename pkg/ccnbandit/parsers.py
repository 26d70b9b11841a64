import io
import json
import os

import persisting_theory
import yaml

from . import exceptions


class Parsers(persisting_theory.Registry):
    def prepare_name(self, data, name):
        data.registry_name = name
        return name

registry = Parsers()
register = registry.register


class Parser(object):
    extensions = ()

    def parse(self, content):
        raise NotImplementedError()


@register(name='json')
class JSONParser(Parser):
    extensions = ('.json',)

    def parse(self, content):
        return json.loads(content)


@register(name='yaml')
class YAMLParser(Parser):
    extensions = ('.yaml', '.yml')

    def parse(self, content):
        return yaml.safe_load(content)


def get_parser(path):
    extension = os.path.splitext(path)[1].lower()
    for parser_class in registry.values():
        if extension in parser_class.extensions:
            return parser_class()
    raise exceptions.ConfigError(
        'Unsupported config format',
        [exceptions.ValidationError('config', 'unsupported file extension {0!r}'.format(extension))])


def load_document(path):
    """
    Read and parse a configuration file. Read failures and syntax errors
    are reported as :py:class:`ccnbandit.exceptions.ConfigError`.
    """
    parser = get_parser(path)
    try:
        with io.open(path, encoding='utf-8') as f:
            content = f.read()
    except (IOError, OSError) as e:
        raise exceptions.ConfigError(
            'Cannot read config', [exceptions.ValidationError('config', str(e))])
    try:
        data = parser.parse(content)
    except (ValueError, yaml.YAMLError) as e:
        raise exceptions.ConfigError(
            'Cannot parse config', [exceptions.ValidationError('config', str(e))])
    if not isinstance(data, dict):
        raise exceptions.ConfigError(
            'Cannot parse config',
            [exceptions.ValidationError('config', 'top level must be a mapping')])
    return data

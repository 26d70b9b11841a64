from . import exceptions
from . import utils


class Adapter(object):
    """
    Turns raw configuration mappings into validated model instances.

    Every error found while cleaning (including nested models and list
    items) is collected and raised at once as a
    :py:class:`ccnbandit.exceptions.ConfigError` whose errors carry dotted
    key paths such as ``arms.1.p``.
    """
    def __init__(self, attributes_converter=utils.to_snake_case):
        self.attributes_converter = attributes_converter

    def parse(self, data, model):
        raw_data = self.get_raw_data(data, model)
        raw_data = self.convert_attribute_names(raw_data)
        cleaned_data = self.full_clean(raw_data, model)
        instance = model(**cleaned_data)
        try:
            instance.clean()
        except exceptions.ValidationError as e:
            raise exceptions.ConfigError('invalid {0}'.format(model._meta.name), [e])
        return instance

    def get_raw_data(self, data, model):
        if not isinstance(data, dict):
            raise exceptions.ConfigError(
                'invalid {0}'.format(model._meta.name),
                [exceptions.ValidationError('', 'expected a mapping, got {0!r}'.format(data))])
        return dict(data)

    def convert_attribute_names(self, data):
        if not self.attributes_converter:
            return data

        return {
            self.attributes_converter(key): value
            for key, value in data.items()
        }

    def full_clean(self, data, model):
        return self.clean(self._clean_fields(data, model), model)

    def clean(self, data, model):
        return data

    def _clean_fields(self, data, model):
        cleaned_data = {}
        errors = []
        for key in sorted(set(data) - set(model._meta.fields)):
            errors.append(exceptions.ValidationError(key, 'unknown key'))

        for key, field in model._meta.fields.items():
            value = data.get(key)
            if value is None:
                if field.has_default():
                    cleaned_data[key] = field.get_default()
                elif field.required:
                    errors.append(exceptions.ValidationError(key, 'this field is required'))
                else:
                    cleaned_data[key] = None
                continue

            cleaner = 'clean_{0}'.format(key)
            try:
                if hasattr(self, cleaner):
                    value = getattr(self, cleaner)(data, value, model, field)
                # We use the default field conversion
                cleaned_data[key] = field.to_python(self, value)
            except exceptions.ConfigError as e:
                errors.extend(error.prefixed(key) for error in e.errors)
            except exceptions.ValidationError as e:
                errors.append(e.prefixed(key))
            except (TypeError, ValueError) as e:
                errors.append(exceptions.ValidationError(key, str(e)))

        if errors:
            raise exceptions.ConfigError('invalid {0}'.format(model._meta.name), errors)
        return cleaned_data


ALIASES = {
    'kind': {
        'nb': 'shifted-negative-binomial',
        'negative-binomial': 'shifted-negative-binomial',
        'truncated-nb': 'truncated-shifted-negative-binomial',
        'table': 'explicit-table',
    },
    'algorithm': {
        'greedy': 'eps-greedy',
        'epsilon-greedy': 'eps-greedy',
        'tuned': 'tuned-eps-greedy',
        'tuned-epsilon-greedy': 'tuned-eps-greedy',
        'lcb': 'ucb',
    },
    'init_strategy': {
        'rr': 'round-robin',
        'uni': 'uniform-random',
        'uniform': 'uniform-random',
        'random': 'uniform-random',
    },
}


def _alias(key, value):
    try:
        normalized = value.strip().lower().replace('_', '-')
    except AttributeError:
        return value
    return ALIASES[key].get(normalized, value)


class ConfigAdapter(Adapter):
    """
    Accepts the short names used in the literature (``RR``, ``Uni``,
    ``nb``...) in addition to the canonical choices
    """

    def clean_kind(self, data, value, model, field):
        return _alias('kind', value)

    def clean_algorithm(self, data, value, model, field):
        return _alias('algorithm', value)

    def clean_init_strategy(self, data, value, model, field):
        return _alias('init_strategy', value)

    def clean_strategies(self, data, value, model, field):
        if isinstance(value, (list, tuple)):
            return [_alias('init_strategy', v) for v in value]
        return value

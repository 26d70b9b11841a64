import numbers

import six

from .exceptions import ConfigError, ValidationError


class NotSet(object):
    pass


class Field(object):
    def __init__(self, default=NotSet, required=True, help_text=None):
        self.default = default
        self.required = required
        self.help_text = help_text

    def get_default(self):
        if self.default is NotSet:
            return None
        if hasattr(self.default, '__call__'):
            return self.default()
        return self.default

    def has_default(self):
        return self.default is not NotSet

    def to_python(self, adapter, v):
        return v

    def as_primitive(self, v):
        return v


class IntegerField(Field):

    def __init__(self, min_value=None, max_value=None, **kwargs):
        self.min_value = min_value
        self.max_value = max_value
        super(IntegerField, self).__init__(**kwargs)

    def to_python(self, adapter, v):
        if isinstance(v, bool):
            raise ValueError('expected an integer, got {0!r}'.format(v))
        if isinstance(v, numbers.Integral):
            value = int(v)
        elif isinstance(v, numbers.Real) and float(v).is_integer():
            value = int(v)
        elif isinstance(v, six.string_types) and v.strip().lstrip('-').isdigit():
            value = int(v)
        else:
            raise ValueError('expected an integer, got {0!r}'.format(v))
        if self.min_value is not None and value < self.min_value:
            raise ValueError('must be >= {0}, got {1}'.format(self.min_value, value))
        if self.max_value is not None and value > self.max_value:
            raise ValueError('must be <= {0}, got {1}'.format(self.max_value, value))
        return value


class FloatField(Field):
    """
    A real number, optionally restricted to an interval. ``open_interval``
    excludes both bounds.
    """

    def __init__(self, min_value=None, max_value=None, open_interval=False, **kwargs):
        self.min_value = min_value
        self.max_value = max_value
        self.open_interval = open_interval
        super(FloatField, self).__init__(**kwargs)

    def to_python(self, adapter, v):
        if isinstance(v, bool):
            raise ValueError('expected a number, got {0!r}'.format(v))
        try:
            value = float(v)
        except (TypeError, ValueError):
            raise ValueError('expected a number, got {0!r}'.format(v))
        if value != value:
            raise ValueError('NaN is not allowed')
        if self.min_value is not None:
            if value < self.min_value or (self.open_interval and value == self.min_value):
                raise ValueError('must be {0} {1}, got {2}'.format(
                    '>' if self.open_interval else '>=', self.min_value, value))
        if self.max_value is not None:
            if value > self.max_value or (self.open_interval and value == self.max_value):
                raise ValueError('must be {0} {1}, got {2}'.format(
                    '<' if self.open_interval else '<=', self.max_value, value))
        return value


class CharField(Field):
    def to_python(self, adapter, v):
        if not isinstance(v, six.string_types):
            raise ValueError('expected a string, got {0!r}'.format(v))
        return v


class BooleanField(Field):
    def to_python(self, adapter, v):
        if not isinstance(v, bool):
            raise ValueError('expected true or false, got {0!r}'.format(v))
        return v


class ChoiceField(CharField):

    def __init__(self, choices, **kwargs):
        self.choices = tuple(choices)
        super(ChoiceField, self).__init__(**kwargs)

    def to_python(self, adapter, v):
        value = super(ChoiceField, self).to_python(adapter, v).strip().lower().replace('_', '-')
        if value not in self.choices:
            raise ValueError('must be one of {0}, got {1!r}'.format(', '.join(self.choices), v))
        return value


class ListField(Field):

    def __init__(self, child, min_length=0, **kwargs):
        self.child = child
        self.min_length = min_length
        super(ListField, self).__init__(**kwargs)

    def to_python(self, adapter, v):
        if isinstance(v, (six.string_types, dict)) or not hasattr(v, '__iter__'):
            raise ValueError('expected a list, got {0!r}'.format(v))
        values = list(v)
        if len(values) < self.min_length:
            raise ValueError('expected at least {0} item(s), got {1}'.format(self.min_length, len(values)))
        cleaned = []
        errors = []
        for i, item in enumerate(values):
            try:
                cleaned.append(self.child.to_python(adapter, item))
            except ConfigError as e:
                errors.extend(error.prefixed(str(i)) for error in e.errors)
            except ValidationError as e:
                errors.append(e.prefixed(str(i)))
            except (TypeError, ValueError) as e:
                errors.append(ValidationError(str(i), str(e)))
        if errors:
            raise ConfigError('invalid list items', errors)
        return cleaned

    def as_primitive(self, v):
        if v is None:
            return None
        return [self.child.as_primitive(item) for item in v]


class ModelField(Field):
    def __init__(self, model, **kwargs):
        self.model = model
        super(ModelField, self).__init__(**kwargs)

    def to_python(self, adapter, v):
        if isinstance(v, self.model):
            return v
        if not isinstance(v, dict):
            raise ValueError('expected a mapping, got {0!r}'.format(v))
        return adapter.parse(v, self.model)

    def as_primitive(self, v):
        if v is None:
            return None
        return v.as_dict()

import collections

import six

from .fields import Field


class Meta(object):
    """Declared fields and the section name used in validation errors"""
    def __init__(self, fields, name):
        self.fields = fields
        self.name = name


def setup_fields(bases, attrs):
    """
    Collect all fields declared on the class (and inherited from model
    bases) and remove them from attrs
    """
    fields = collections.OrderedDict()
    for base in bases:
        meta = getattr(base, '_meta', None)
        if meta:
            fields.update(meta.fields)
    for key, value in list(attrs.items()):
        if not isinstance(value, Field):
            continue
        fields[key] = value
        del attrs[key]
    return fields


class BaseModelMeta(type):
    def __new__(cls, name, bases, attrs):
        declared_meta = attrs.get('Meta')
        meta_name = getattr(declared_meta, 'name', None) if declared_meta else None
        attrs['_meta'] = Meta(
            fields=setup_fields(bases, attrs),
            name=meta_name or name.lower(),
        )
        return super(BaseModelMeta, cls).__new__(cls, name, bases, attrs)


class Model(six.with_metaclass(BaseModelMeta, object)):

    def __init__(self, **kwargs):
        for field_name, field in self._meta.fields.items():
            setattr(self, field_name, field.get_default())
        for field_name, value in kwargs.items():
            setattr(self, field_name, value)

    def clean(self):
        """
        Cross-field validation hook, raise
        :py:class:`ccnbandit.exceptions.ValidationError` naming the key
        """
        pass

    def as_dict(self):
        return collections.OrderedDict(
            (name, field.as_primitive(getattr(self, name)))
            for name, field in self._meta.fields.items()
        )

    def __eq__(self, other):
        return type(self) is type(other) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return '<{0}: {1}>'.format(
            self.__class__.__name__,
            ', '.join('{0}={1!r}'.format(k, v) for k, v in self.as_dict().items()))

class CCNBanditException(Exception):
    pass


class ValidationError(CCNBanditException, ValueError):
    """
    A single configuration value is missing or out of range
    """
    def __init__(self, key, message):
        super(ValidationError, self).__init__('{0}: {1}'.format(key, message))
        self.key = key
        self.message = message

    def prefixed(self, prefix):
        if not prefix:
            return self
        key = '{0}.{1}'.format(prefix, self.key) if self.key else prefix
        return self.__class__(key, self.message)


class ConfigError(CCNBanditException, ValueError):
    """
    The configuration cannot be used; carries every validation error found
    """
    def __init__(self, message, errors=None):
        super(ConfigError, self).__init__(message)
        self.errors = list(errors or [])

    def lines(self):
        if not self.errors:
            return [str(self)]
        return ['{0}: {1}'.format(e.key, e.message) for e in self.errors]


class InvalidDistribution(CCNBanditException, ValueError):
    pass


class InvalidTruncation(InvalidDistribution):
    pass


class DomainError(CCNBanditException, ValueError):
    """
    A theorem precondition does not hold for the given inputs
    """
    pass


class ConsistencyError(CCNBanditException, RuntimeError):
    """
    Simulator bookkeeping went wrong, this is a bug
    """
    pass


class UnknownPreset(CCNBanditException, KeyError):
    pass


class NotInCache(CCNBanditException, KeyError):
    pass

import numpy as np
from scipy import stats


class RunningMoments(object):
    """
    Per-slot mean and sum of squared deviations, fed one replication at a
    time (Welford's update). Memory stays at a few vectors of the horizon
    length whatever the number of replications.
    """

    def __init__(self):
        self.count = 0
        self.mean = None
        self._m2 = None

    def add(self, values):
        values = np.asarray(values, dtype=float)
        self.count += 1
        if self.mean is None:
            self.mean = values.copy()
            self._m2 = np.zeros_like(self.mean)
            return
        delta = values - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (values - self.mean)

    def variance(self, ddof=1):
        if self.count - ddof <= 0:
            return np.zeros_like(self.mean)
        return self._m2 / (self.count - ddof)


class Aggregate(object):
    """
    Reduce a ``replications x slots`` matrix along the replication axis,
    or summarize the :py:class:`RunningMoments` of the same data
    """
    name = None

    def __init__(self, attr_name, **kwargs):
        self.attr_name = attr_name

    @property
    def identifier(self):
        return '{0}__{1}'.format(self.attr_name, self.name)

    def aggregate(self, values):
        raise NotImplementedError

    def summarize(self, moments):
        raise NotImplementedError

    def __hash__(self):
        return hash((self.attr_name, self.name))


class Mean(Aggregate):
    name = 'mean'

    def aggregate(self, values):
        return np.mean(values, axis=0)

    def summarize(self, moments):
        return moments.mean.copy()


class StdErr(Aggregate):
    name = 'stderr'

    def aggregate(self, values):
        values = np.asarray(values, dtype=float)
        n = values.shape[0]
        if n < 2:
            return np.zeros(values.shape[1:])
        return np.std(values, axis=0, ddof=1) / np.sqrt(n)

    def summarize(self, moments):
        return np.sqrt(moments.variance(ddof=1) / moments.count)


class HalfWidth(Aggregate):
    """
    Normal-approximation confidence half-width; on 0/1 data this is
    ``z * sqrt(p (1 - p) / n)``
    """
    name = 'halfwidth'

    def __init__(self, attr_name, confidence=0.95, **kwargs):
        self.confidence = confidence
        super(HalfWidth, self).__init__(attr_name, **kwargs)

    @property
    def z(self):
        return stats.norm.ppf(0.5 + self.confidence / 2)

    def aggregate(self, values):
        values = np.asarray(values, dtype=float)
        return self.z * np.std(values, axis=0) / np.sqrt(values.shape[0])

    def summarize(self, moments):
        return self.z * np.sqrt(moments.variance(ddof=0) / moments.count)

    def __hash__(self):
        return hash((self.attr_name, self.name, self.confidence))


def collect(data, aggregates):
    """
    Apply each aggregate to ``data[aggregate.attr_name]``, either a matrix
    or a :py:class:`RunningMoments`, and return the results keyed by
    identifier
    """
    results = {}
    for aggregate in aggregates:
        values = data[aggregate.attr_name]
        if isinstance(values, RunningMoments):
            results[aggregate.identifier] = aggregate.summarize(values)
        else:
            results[aggregate.identifier] = aggregate.aggregate(values)
    return results

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InsufficientDataError, ParameterError


@dataclass(frozen=True, eq=False)
class Sample:
    """An ordered series of observations with a little provenance.

    `values` is stored as a read-only float64 array; every entry must be finite.
    """
    values: np.ndarray
    name: str = 'sample'
    is_returns: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise InsufficientDataError('sample %r is empty' % self.name)
        if not np.all(np.isfinite(arr)):
            raise ParameterError('sample %r contains non-finite values' % self.name)
        arr.flags.writeable = False
        object.__setattr__(self, 'values', arr)

    def __len__(self):
        return self.values.size

    def positive(self):
        if np.any(self.values <= 0):
            raise ParameterError('sample %r must be strictly positive' % self.name)
        return self.values

    def with_values(self, values, suffix=None):
        name = '%s:%s' % (self.name, suffix) if suffix else self.name
        return Sample(values, name=name, is_returns=self.is_returns, meta=dict(self.meta))


def as_sample(data, name='sample'):
    if isinstance(data, Sample):
        return data
    return Sample(np.asarray(data, dtype=float), name=name)

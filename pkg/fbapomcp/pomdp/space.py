from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from fbapomcp.common.exceptions import InvalidArgumentError


FeatureVector = Tuple[int, ...]


@dataclass(frozen=True)
class Feature:
    name: str
    arity: int


@dataclass(frozen=True)
class FactoredSpace:
    """
    An ordered list of discrete features.

    Flat indices use little-endian mixed radix: feature 0 varies fastest.
    """

    features: Tuple[Feature, ...]
    _strides: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.features:
            raise InvalidArgumentError("A space needs at least one feature")
        for feature in self.features:
            if feature.arity < 2:
                raise InvalidArgumentError(
                    f"Feature '{feature.name}' has arity {feature.arity}; arity must be >= 2"
                )
        strides, stride = [], 1
        for feature in self.features:
            strides.append(stride)
            stride *= feature.arity
        object.__setattr__(self, "_strides", tuple(strides))

    @classmethod
    def from_arities(cls, named_arities: Sequence[Tuple[str, int]]) -> "FactoredSpace":
        return cls(tuple(Feature(name, arity) for name, arity in named_arities))

    @property
    def num_features(self) -> int:
        return len(self.features)

    @property
    def arities(self) -> Tuple[int, ...]:
        return tuple(f.arity for f in self.features)

    @property
    def names(self) -> List[str]:
        return [f.name for f in self.features]

    @property
    def size(self) -> int:
        return int(np.prod(self.arities))

    def feature_index(self, name: str) -> int:
        for i, feature in enumerate(self.features):
            if feature.name == name:
                return i
        raise InvalidArgumentError(f"Unknown feature '{name}'")

    def index(self, vector: Sequence[int]) -> int:
        if len(vector) != len(self.features):
            raise InvalidArgumentError(
                f"Vector has {len(vector)} entries, space has {len(self.features)} features"
            )
        flat = 0
        for value, stride, feature in zip(vector, self._strides, self.features):
            if not 0 <= value < feature.arity:
                raise InvalidArgumentError(
                    f"Value {value} out of range for feature '{feature.name}'"
                )
            flat += value * stride
        return flat

    def vector(self, index: int) -> FeatureVector:
        if not 0 <= index < self.size:
            raise InvalidArgumentError(f"Index {index} out of range [0, {self.size})")
        values = []
        for feature in self.features:
            index, value = divmod(index, feature.arity)
            values.append(value)
        return tuple(values)

    def all_vectors(self) -> np.ndarray:
        """
        (size, num_features) array; row i is ``vector(i)``.
        """
        grids = np.indices(self.arities[::-1]).reshape(len(self.features), -1)
        return grids[::-1].T.copy()

    def __iter__(self) -> Iterator[FeatureVector]:
        for i in range(self.size):
            yield self.vector(i)

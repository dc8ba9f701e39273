import copy
from abc import ABC, abstractmethod
from typing import Dict, Hashable, Iterable, Optional, Set, Tuple, TypeVar

import numpy as np


C = TypeVar("C", bound="RowOverlayCounts")


class RowOverlayCounts(ABC):
    """
    Dirichlet count rows stored as a shared base plus per-row overrides.

    A persistent instance is never mutated: ``incremented`` returns a new
    instance that copies only the rows it touches. A scratch instance
    (from ``scratch()``) is mutated in place and is meant to live for one
    simulated future; dropping it discards every imagined update.
    """

    def __init__(self, rows: Optional[Dict[Hashable, np.ndarray]] = None):
        self._rows: Dict[Hashable, np.ndarray] = dict(rows or {})
        self._owned: Set[Hashable] = set()
        self._scratch = False

    @abstractmethod
    def _base_row(self, key: Hashable) -> np.ndarray:
        pass

    @property
    def is_scratch(self) -> bool:
        return self._scratch

    @property
    def overridden_rows(self) -> Dict[Hashable, np.ndarray]:
        return self._rows

    def row(self, key: Hashable) -> np.ndarray:
        overridden = self._rows.get(key)
        return overridden if overridden is not None else self._base_row(key)

    def scratch(self: C) -> C:
        return self._clone(scratch=True)

    def incremented(self: C, increments: Iterable[Tuple[Hashable, int]]) -> C:
        target = self if self._scratch else self._clone(scratch=False)
        for key, index in increments:
            if key in target._owned:
                counts = target._rows[key]
            else:
                counts = target.row(key).copy()
                target._rows[key] = counts
                target._owned.add(key)
            counts[index] += 1.0
        return target

    def _clone(self: C, scratch: bool) -> C:
        clone = copy.copy(self)
        clone._rows = dict(self._rows)
        clone._owned = set()
        clone._scratch = scratch
        return clone

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .encoding import FeatureVector
from .error import DimensionError, EvaluationError

Vector = Union[FeatureVector, np.ndarray, Sequence[float]]


def asArray(vector: Vector) -> np.ndarray:
    if isinstance(vector, FeatureVector):
        return vector.bins
    else:
        return np.asarray(vector, dtype=np.float64)


@dataclass(frozen=True)
class FeatureSet:
    """
    The features and class labels of a corpus, in dataset order.

    @param vectors: A 2-dimensional C{float64} C{numpy} array with one row per
        image.
    @param labels: A C{tuple} of C{str} class labels, one per image.
    @param paths: A C{tuple} of C{str} image paths, one per image (may be
        empty if paths are not known).
    """

    vectors: np.ndarray
    labels: tuple[str, ...]
    paths: tuple[str, ...] = ()
    _classSizes: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "paths", tuple(self.paths))
        if self.vectors.ndim != 2:
            raise DimensionError(
                "Feature vectors must be given as a 2-dimensional array."
            )
        if len(self.labels) != len(self.vectors):
            raise DimensionError(
                "There are %d feature vectors but %d labels."
                % (len(self.vectors), len(self.labels))
            )
        if self.paths and len(self.paths) != len(self.vectors):
            raise DimensionError(
                "There are %d feature vectors but %d paths."
                % (len(self.vectors), len(self.paths))
            )
        sizes: dict[str, int] = {}
        for label in self.labels:
            sizes[label] = sizes.get(label, 0) + 1
        object.__setattr__(self, "_classSizes", sizes)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def classSizes(self) -> dict[str, int]:
        """
        The number of images in each class, keyed by label in order of first
        appearance.
        """
        return dict(self._classSizes)

    def classSize(self, label: str) -> int:
        return self._classSizes[label]

    def scaled(self, factor: float) -> "FeatureSet":
        """
        Get a copy with every vector multiplied by a constant.
        """
        return FeatureSet(self.vectors * factor, self.labels, self.paths)


def chiSquareToAll(query: Vector, vectors: np.ndarray) -> np.ndarray:
    """
    Compute the chi-square distance from one vector to each row of a matrix.

    @param query: A 1-dimensional vector.
    @param vectors: A 2-dimensional C{numpy} array whose rows have the length
        of C{query}.
    @raise DimensionError: If the lengths differ.
    @return: A 1-dimensional C{float64} array of distances.
    """
    x = asArray(query)
    if vectors.ndim != 2 or vectors.shape[1] != len(x):
        raise DimensionError(
            "Cannot compare a vector of length %d with vectors of shape %r."
            % (len(x), vectors.shape)
        )
    difference = vectors - x
    total = vectors + x
    # Terms whose bins are both zero contribute nothing.
    terms = np.divide(
        difference * difference,
        total,
        out=np.zeros_like(total, dtype=np.float64),
        where=total != 0,
    )
    return 0.5 * terms.sum(axis=1)


def chiSquare(x: Vector, y: Vector) -> float:
    """
    Compute the chi-square distance between two histograms.

    @param x: A vector of non-negative bins.
    @param y: A vector of non-negative bins, of the same length as C{x}.
    @raise DimensionError: If the lengths differ.
    @return: The C{float} value of 1/2 * sum((x - y)^2 / (x + y)), where terms
        with a zero denominator count as 0.
    """
    xArray = asArray(x)
    yArray = asArray(y)
    if xArray.shape != yArray.shape:
        raise DimensionError(
            "Cannot compare vectors of lengths %d and %d." % (len(xArray), len(yArray))
        )
    return float(chiSquareToAll(xArray, yArray.reshape(1, -1))[0])


@dataclass(frozen=True)
class RankedList:
    """
    Gallery images ordered by their distance to a query.

    @param queryIndex: The C{int} dataset index of the query, or C{None} for a
        query from outside the dataset.
    @param indices: A 1-dimensional C{int} C{numpy} array of gallery dataset
        indices, nearest first.
    @param distances: A 1-dimensional C{float64} C{numpy} array of the
        corresponding distances (non-decreasing).
    """

    queryIndex: Optional[int]
    indices: np.ndarray
    distances: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)

    def rank(self, index: int) -> int:
        """
        Get the 1-based rank of a gallery image.

        @param index: The C{int} dataset index of a gallery image.
        @raise KeyError: If C{index} is not in the list.
        @return: The C{int} rank.
        """
        positions = np.flatnonzero(self.indices == index)
        if len(positions) == 0:
            raise KeyError(index)
        return int(positions[0]) + 1

    def top(self, count: int) -> list[tuple[int, float]]:
        """
        Get the nearest gallery images.

        @param count: The C{int} number of entries wanted.
        @return: A C{list} of (index, distance) C{tuple}s.
        """
        return [
            (int(index), float(distance))
            for index, distance in zip(self.indices[:count], self.distances[:count])
        ]


def rankGallery(
    query: Vector,
    vectors: np.ndarray,
    queryIndex: Optional[int] = None,
    gallery: Optional[Iterable[int]] = None,
) -> RankedList:
    """
    Order gallery images by chi-square distance to a query.

    @param query: The query feature vector.
    @param vectors: A 2-dimensional C{numpy} array of all dataset features.
    @param queryIndex: The C{int} dataset index of the query if it belongs to
        the dataset, in which case it is never included in the result.
    @param gallery: An iterable of C{int} dataset indices to rank, or C{None}
        to rank the whole dataset.
    @raise EvaluationError: If the gallery is empty once the query is removed.
    @return: A C{RankedList}. Equal distances are ordered by ascending index.
    """
    if gallery is None:
        indices = np.arange(len(vectors))
    else:
        indices = np.array(sorted(set(gallery)), dtype=np.int64)

    if queryIndex is not None:
        indices = indices[indices != queryIndex]

    if len(indices) == 0:
        raise EvaluationError(
            "Cannot rank an empty gallery (query index %r)." % queryIndex
        )

    distances = chiSquareToAll(query, vectors[indices])
    # A stable sort of ascending indices breaks distance ties by index.
    order = np.argsort(distances, kind="stable")
    return RankedList(queryIndex, indices[order], distances[order])

"""
Retrieval and recognition measures.

Retrieval measures treat every image in turn as a query against all the other
images. Averages over the dataset are class-balanced: a per-class mean over
that class's queries, then a mean over classes.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .dataset import Dataset, Split, makeSplits
from .descriptors import DescriptorConfig, extractAll
from .error import EvaluationError, ParameterError
from .matching import FeatureSet, RankedList, rankGallery

logger = logging.getLogger(__name__)

# The MPEG-7 penalty factor for ground truth images retrieved beyond the cutoff.
ANMRR_PENALTY = 1.25

NAN = float("nan")


def _queryLabel(
    ranked: RankedList, labels: Sequence[str], queryLabel: Optional[str]
) -> str:
    if queryLabel is not None:
        return queryLabel
    elif ranked.queryIndex is not None:
        return labels[ranked.queryIndex]
    else:
        raise EvaluationError(
            "The class of a query from outside the dataset must be given."
        )


def _checkLambda(lam: int, length: int) -> None:
    if not 1 <= lam <= length:
        raise ParameterError(
            "The number of retrieved images (%r) must be between 1 and %d."
            % (lam, length)
        )


def hitCount(
    ranked: RankedList,
    labels: Sequence[str],
    lam: int,
    queryLabel: Optional[str] = None,
) -> int:
    """
    Count the images of the query's class among the first lam retrieved.

    @param ranked: A C{RankedList}.
    @param labels: The C{str} class label of every dataset image.
    @param lam: The C{int} number of retrieved images to examine.
    @param queryLabel: The C{str} class of the query, needed only if the query
        is not a dataset image.
    @raise ParameterError: If C{lam} is not between 1 and the list length.
    @return: The C{int} number of hits.
    """
    _checkLambda(lam, len(ranked))
    label = _queryLabel(ranked, labels, queryLabel)
    return sum(1 for index in ranked.indices[:lam] if labels[index] == label)


def precisionAt(
    ranked: RankedList,
    labels: Sequence[str],
    lam: int,
    queryLabel: Optional[str] = None,
) -> float:
    """
    The fraction of the first lam retrieved images that share the query's
    class.

    @param ranked: A C{RankedList}.
    @param labels: The C{str} class label of every dataset image.
    @param lam: The C{int} number of retrieved images.
    @param queryLabel: The C{str} class of the query, needed only if the query
        is not a dataset image.
    @raise ParameterError: If C{lam} is not between 1 and the list length.
    @return: A C{float} precision.
    """
    return hitCount(ranked, labels, lam, queryLabel) / lam


def recallAt(
    ranked: RankedList,
    labels: Sequence[str],
    lam: int,
    queryLabel: Optional[str] = None,
) -> float:
    """
    The number of the query's classmates among the first lam retrieved images,
    divided by the size of the query's class. The class size includes the
    query itself, so the recall of a dataset query never reaches 1.

    @param ranked: A C{RankedList}.
    @param labels: The C{str} class label of every dataset image.
    @param lam: The C{int} number of retrieved images.
    @param queryLabel: The C{str} class of the query, needed only if the query
        is not a dataset image.
    @raise ParameterError: If C{lam} is not between 1 and the list length.
    @return: A C{float} recall.
    """
    label = _queryLabel(ranked, labels, queryLabel)
    classSize = sum(1 for other in labels if other == label)
    return hitCount(ranked, labels, lam, label) / classSize


def fScore(arpValue: float, arrValue: float) -> float:
    """
    The harmonic mean of average retrieval precision and recall.

    @param arpValue: A C{float} ARP.
    @param arrValue: A C{float} ARR.
    @return: The C{float} F-Score, or 0.0 if both arguments are 0.
    """
    total = arpValue + arrValue
    return 0.0 if total == 0 else 2.0 * arpValue * arrValue / total


def normalizedModifiedRetrievalRank(
    ranks: Sequence[int], groundTruthCount: int
) -> float:
    """
    Compute the normalized modified retrieval rank of one query.

    @param ranks: The C{int} 1-based retrieval ranks of the query's ground
        truth images.
    @param groundTruthCount: The C{int} number of ground truth images, NG.
    @raise EvaluationError: If there is no ground truth.
    @return: A C{float} in the range 0 (all ground truth at the top of the
        list) to 1 (none within the first 2 * NG).
    """
    if groundTruthCount < 1:
        raise EvaluationError("A query with no ground truth images has no NMRR.")
    cutoff = 2 * groundTruthCount
    penalty = ANMRR_PENALTY * cutoff
    modifiedRanks = [rank if rank <= cutoff else penalty for rank in ranks]
    averageRank = sum(modifiedRanks) / len(modifiedRanks)
    modified = averageRank - 0.5 - groundTruthCount / 2
    return modified / (penalty - 0.5 - 0.5 * groundTruthCount)


class Retrieval:
    """
    Leave-one-out retrieval over a feature set: every image is a query whose
    gallery is all the other images.

    The relevance of each query's ranked list is computed once, on first use,
    and shared by all the measures.

    @param features: A C{FeatureSet}.
    @param workers: The C{int} number of threads to rank queries with. Results
        do not depend on this.
    """

    def __init__(self, features: FeatureSet, workers: int = 1) -> None:
        if len(features) < 2:
            raise EvaluationError(
                "Retrieval needs at least 2 images (found %d)." % len(features)
            )
        self.features = features
        self.workers = workers
        self._hits: Optional[np.ndarray] = None
        self._labelArray = np.array(features.labels)
        self._classSizes = np.array(
            [features.classSize(label) for label in features.labels]
        )

    def ranking(self, queryIndex: int) -> RankedList:
        """
        Rank all the other images against one query.

        @param queryIndex: The C{int} index of the query image.
        @return: A C{RankedList}.
        """
        vectors = self.features.vectors
        return rankGallery(vectors[queryIndex], vectors, queryIndex=queryIndex)

    def _hitRow(self, queryIndex: int) -> np.ndarray:
        labels = self._labelArray
        return labels[self.ranking(queryIndex).indices] == labels[queryIndex]

    def hits(self) -> np.ndarray:
        """
        Get the relevance of every retrieved image.

        Only the relevance matrix is kept. Each query's ranked list is
        dropped as soon as its row is built.

        @return: A C{bool} C{numpy} array with one row per query, whose entry
            at position k is C{True} if the image at rank k + 1 shares the
            query's class.
        """
        if self._hits is None:
            queries = range(len(self.features))
            with ThreadPoolExecutor(max_workers=max(1, self.workers)) as executor:
                self._hits = np.array(list(executor.map(self._hitRow, queries)))
            logger.info("Ranked %d queries.", len(self._hits))
        return self._hits

    @property
    def listLength(self) -> int:
        return len(self.features) - 1

    def _classBalancedMean(self, perQuery: np.ndarray) -> float:
        means = [
            perQuery[self._labelArray == label].mean()
            for label in self.features.classSizes
        ]
        return float(np.mean(means))

    def precisions(self, lam: int) -> np.ndarray:
        _checkLambda(lam, self.listLength)
        return self.hits()[:, :lam].sum(axis=1) / lam

    def recalls(self, lam: Optional[int] = None) -> np.ndarray:
        """
        Get the recall of every query.

        @param lam: The C{int} number of retrieved images, or C{None} to
            retrieve as many images as there are in each query's class.
        @return: A C{float64} C{numpy} array, one recall per query.
        """
        hits = self.hits()
        if lam is None:
            counts = np.array(
                [
                    row[: min(size, self.listLength)].sum()
                    for row, size in zip(hits, self._classSizes)
                ]
            )
        else:
            _checkLambda(lam, self.listLength)
            counts = hits[:, :lam].sum(axis=1)
        return counts / self._classSizes

    def arp(self, lam: int) -> float:
        """
        Average retrieval precision.

        @param lam: The C{int} number of retrieved images.
        @raise ParameterError: If C{lam} is not between 1 and the number of
            images - 1.
        @return: The class-balanced C{float} mean precision.
        """
        return self._classBalancedMean(self.precisions(lam))

    def arr(self, lam: Optional[int] = None) -> float:
        """
        Average retrieval rate (recall).

        @param lam: The C{int} number of retrieved images, or C{None} to use
            each query's class size.
        @raise ParameterError: If C{lam} is not between 1 and the number of
            images - 1.
        @return: The class-balanced C{float} mean recall.
        """
        return self._classBalancedMean(self.recalls(lam))

    def fScore(self, lam: int) -> float:
        return fScore(self.arp(lam), self.arr(lam))

    def anmrr(self) -> float:
        """
        Average normalized modified retrieval rank over all queries.

        @raise EvaluationError: If some class has only one image, so that its
            query has no ground truth.
        @return: A C{float} in the range 0 (perfect) to 1 (total miss).
        """
        for label, size in self.features.classSizes.items():
            if size < 2:
                raise EvaluationError(
                    "ANMRR needs at least 2 images in every class, but class "
                    "%r has only 1." % label
                )

        values = [
            normalizedModifiedRetrievalRank(
                list(np.flatnonzero(row) + 1), int(size) - 1
            )
            for row, size in zip(self.hits(), self._classSizes)
        ]
        return float(np.mean(values))

    def recognitionRate(self) -> float:
        """
        Leave-one-out nearest neighbour recognition rate.

        @return: The C{float} percentage of images whose nearest other image
            is of the same class.
        """
        return 100.0 * float(self.hits()[:, 0].mean())

    def firstMatchRanks(self) -> list[int]:
        """
        Get the rank of the first same-class image retrieved for each query.

        @raise EvaluationError: If some query has no classmate.
        @return: A C{list} of C{int} 1-based ranks, in query order.
        """
        result = []
        for index, row in enumerate(self.hits()):
            matches = np.flatnonzero(row)
            if len(matches) == 0:
                raise EvaluationError(
                    "Image %d of class %r has no other image of its class."
                    % (index, self.features.labels[index])
                )
            result.append(int(matches[0]) + 1)
        return result

    def curve(self, lambdas: Iterable[int]) -> pd.DataFrame:
        """
        Tabulate ARP, ARR and F-Score against the number of retrieved images.

        @param lambdas: An iterable of C{int} numbers of retrieved images.
        @return: A C{pd.DataFrame} with columns lambda, ARP, ARR and F-Score.
        """
        rows = []
        for lam in lambdas:
            arpValue = self.arp(lam)
            arrValue = self.arr(lam)
            rows.append((lam, arpValue, arrValue, fScore(arpValue, arrValue)))
        return pd.DataFrame(rows, columns=["lambda", "ARP", "ARR", "F-Score"])


def arp(features: FeatureSet, lam: int) -> float:
    return Retrieval(features).arp(lam)


def arr(features: FeatureSet, lam: Optional[int] = None) -> float:
    return Retrieval(features).arr(lam)


def anmrr(features: FeatureSet) -> float:
    return Retrieval(features).anmrr()


def recognitionRate(features: FeatureSet) -> float:
    return Retrieval(features).recognitionRate()


def retrievalCurve(features: FeatureSet, lambdas: Iterable[int]) -> pd.DataFrame:
    return Retrieval(features).curve(lambdas)


def cumulativeMatch(firstMatchRanks: Sequence[int], maxRank: int) -> list[float]:
    """
    Turn first-match ranks into a cumulative match characteristic.

    @param firstMatchRanks: The C{int} rank at which each probe first met its
        class.
    @param maxRank: The C{int} largest rank to report.
    @raise ParameterError: If C{maxRank} is less than 1.
    @raise EvaluationError: If there are no probes.
    @return: A C{list} of C{maxRank} C{float}s, the fraction of probes whose
        first match is at or before ranks 1, 2, ..., C{maxRank}.
    """
    if maxRank < 1:
        raise ParameterError("The maximum rank (%r) must be at least 1." % maxRank)
    if not firstMatchRanks:
        raise EvaluationError("A CMC needs at least one probe.")
    ranks = np.array(firstMatchRanks)
    return [float((ranks <= rank).mean()) for rank in range(1, maxRank + 1)]


def cmc(features: FeatureSet, split: Split, maxRank: int) -> list[float]:
    """
    Compute the cumulative match characteristic of a probe/gallery split.

    @param features: A C{FeatureSet}.
    @param split: A C{Split} of the feature set's indices.
    @param maxRank: The C{int} largest rank to report.
    @raise EvaluationError: If a probe's class has no gallery image.
    @return: A C{list} of C{maxRank} C{float} cumulative match scores.
    """
    labels = features.labels
    gallery = split.sortedGallery()
    firstRanks = []
    for probe in split.sortedProbe():
        ranked = rankGallery(features.vectors[probe], features.vectors, probe, gallery)
        matches = [
            rank
            for rank, index in enumerate(ranked.indices, start=1)
            if labels[index] == labels[probe]
        ]
        if not matches:
            raise EvaluationError(
                "Probe %d of class %r has no image of its class in the gallery."
                % (probe, labels[probe])
            )
        firstRanks.append(matches[0])
    return cumulativeMatch(firstRanks, maxRank)


def leaveOneOutCmc(features: FeatureSet, maxRank: int) -> list[float]:
    """
    Compute the cumulative match characteristic with each image in turn as
    the only probe.

    @param features: A C{FeatureSet}.
    @param maxRank: The C{int} largest rank to report.
    @raise EvaluationError: If some class has only one image.
    @return: A C{list} of C{maxRank} C{float} cumulative match scores.
    """
    return cumulativeMatch(Retrieval(features).firstMatchRanks(), maxRank)


def splitRecognitionRate(features: FeatureSet, split: Split) -> float:
    """
    Classify each probe by its nearest gallery image.

    @param features: A C{FeatureSet}.
    @param split: A C{Split} of the feature set's indices.
    @raise EvaluationError: If the split has no probes or no gallery.
    @return: The C{float} percentage of probes whose nearest gallery image
        is of the same class.
    """
    probes = split.sortedProbe()
    if not probes:
        raise EvaluationError(
            "Fold %d (probe fraction %r) has no probe images."
            % (split.foldIndex, split.probeFraction)
        )
    gallery = split.sortedGallery()
    labels = features.labels
    matches = 0
    for probe in probes:
        ranked = rankGallery(features.vectors[probe], features.vectors, probe, gallery)
        if labels[int(ranked.indices[0])] == labels[probe]:
            matches += 1
    return 100.0 * matches / len(probes)


@dataclass(frozen=True)
class CrossValidationResult:
    """
    Recognition rates of the folds made for one probe fraction.

    A fold with no probe images has a rate of NaN.
    """

    fraction: float
    foldRates: tuple[float, ...]

    @property
    def usable(self) -> bool:
        return not all(np.isnan(rate) for rate in self.foldRates)

    @property
    def mean(self) -> float:
        """
        The mean rate of the folds that had probes, or NaN if none did.
        """
        if self.usable:
            return float(np.nanmean(self.foldRates))
        else:
            return NAN


def crossValidatedRecognition(
    data: Union[FeatureSet, Dataset],
    fractions: Iterable[float],
    folds: int,
    seed: int,
    descriptor: Optional[DescriptorConfig] = None,
    workers: int = 1,
) -> list[CrossValidationResult]:
    """
    Nearest neighbour recognition over repeated random probe/gallery splits.

    @param data: A C{FeatureSet}, or a C{Dataset} whose features will be
        extracted with C{descriptor}.
    @param fractions: An iterable of C{float} probe fractions.
    @param folds: The C{int} number of splits per fraction.
    @param seed: The C{int} 64-bit unsigned seed for the splits.
    @param descriptor: A C{DescriptorConfig}, required if C{data} is a
        C{Dataset}.
    @param workers: The C{int} number of threads used to evaluate folds.
    @raise ParameterError: If a fraction, the fold count or the seed is out of
        range, or a C{Dataset} is given without a descriptor.
    @return: A C{list} of C{CrossValidationResult}s, one per fraction in the
        given order. A fraction too small to give any class a probe image is
        logged as a warning and its fold rates are NaN.
    """
    if isinstance(data, Dataset):
        if descriptor is None:
            raise ParameterError(
                "A descriptor must be given to cross-validate on a dataset."
            )
        features = FeatureSet(
            extractAll(data.images, descriptor, workers),
            data.labels,
            data.relativePaths(),
        )
    else:
        features = data

    results = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        for fraction in fractions:
            splits = makeSplits(features, fraction, folds, seed)
            # Probe counts depend only on the fraction, so every fold of a
            # fraction is empty or none is.
            if not splits[0].probe:
                logger.warning(
                    "Probe fraction %r gives no probe images for any class, so "
                    "its recognition rate is undefined.",
                    fraction,
                )
                results.append(CrossValidationResult(fraction, (NAN,) * folds))
                continue
            rates = tuple(
                executor.map(
                    lambda split: splitRecognitionRate(features, split), splits
                )
            )
            result = CrossValidationResult(fraction, rates)
            logger.info(
                "Probe fraction %.2f: mean recognition rate %.2f%% over %d fold%s.",
                fraction,
                result.mean,
                folds,
                "" if folds == 1 else "s",
            )
            results.append(result)

    return results


def averageRecognitionRate(results: Sequence[CrossValidationResult]) -> float:
    """
    Average the per-fraction mean recognition rates, leaving out fractions
    that gave no probe images.

    @param results: A sequence of C{CrossValidationResult}s.
    @raise EvaluationError: If no result has a recognition rate.
    @return: The C{float} mean percentage.
    """
    means = [result.mean for result in results if result.usable]
    if not means:
        raise EvaluationError(
            "There are no cross-validation results to average (no probe "
            "fraction gave any probe images)."
        )
    return float(np.mean(means))

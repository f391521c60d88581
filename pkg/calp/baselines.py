"""
Classical local pattern descriptors, computed over the 3x3 neighbourhood of
every interior pixel.

Neighbours are numbered clockwise from the top-left corner:

    0  1  2
    7  c  3
    6  5  4

so neighbour p and neighbour p + 4 are centre-symmetric.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import GrayImage
from .encoding import CodeImage, FeatureVector, checkImageSize, histogram
from .error import ParameterError

LBP_BINS = 256
CSLBP_BINS = 16
CSLTP_BINS = 9

DEFAULT_THRESHOLDS = {
    "lbp": 0.0,
    "cslbp": 0.0,
    "csltp": 1.0,
}

# (row, column) offsets of neighbours 0 to 7.
NEIGHBOUR_OFFSETS = (
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
)


@dataclass(frozen=True)
class BaselineConfig:
    """
    The selection of a baseline descriptor.

    @param kind: One of 'lbp', 'cslbp' or 'csltp'.
    @param threshold: The C{float} comparison threshold, in intensity units.
        Ignored for LBP. If C{None}, the descriptor's default is used.
    """

    kind: str
    threshold: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in DEFAULT_THRESHOLDS:
            raise ParameterError(
                "Unknown baseline descriptor %r (known: %s)."
                % (self.kind, ", ".join(sorted(DEFAULT_THRESHOLDS)))
            )
        if self.threshold is not None and self.threshold < 0:
            raise ParameterError(
                "The threshold must not be negative (got %r)." % self.threshold
            )

    @property
    def effectiveThreshold(self) -> float:
        if self.threshold is None:
            return DEFAULT_THRESHOLDS[self.kind]
        else:
            return self.threshold


def neighbours(image: GrayImage) -> tuple[np.ndarray, list[np.ndarray]]:
    """
    Get the centre and the eight neighbours of every interior pixel.

    @param image: A C{GrayImage} of at least 3x3 pixels.
    @raise DimensionError: If the image is too small.
    @return: A 2-C{tuple} with the C{int16} array of centre pixels and a
        C{list} of the eight C{int16} neighbour arrays, in clockwise order.
    """
    checkImageSize(image, 1)
    pixels = image.pixels.astype(np.int16)
    height, width = pixels.shape
    centre = pixels[1 : height - 1, 1 : width - 1]
    result = [
        pixels[1 + dRow : height - 1 + dRow, 1 + dColumn : width - 1 + dColumn]
        for dRow, dColumn in NEIGHBOUR_OFFSETS
    ]
    return centre, result


def lbpCodeImage(image: GrayImage) -> CodeImage:
    """
    Compute the local binary pattern of every interior pixel.

    A neighbour contributes its bit when it is at least as bright as the
    centre.

    @param image: A C{GrayImage} of at least 3x3 pixels.
    @raise DimensionError: If the image is too small.
    @return: A C{CodeImage} of codes in the range 0 to 255.
    """
    centre, ring = neighbours(image)
    codes = np.zeros(centre.shape, dtype=np.int64)
    for p, neighbour in enumerate(ring):
        codes += (neighbour >= centre).astype(np.int64) << p
    return CodeImage(codes, 1)


def cslbpCodeImage(image: GrayImage, t: float = 0.0) -> CodeImage:
    """
    Compute the centre-symmetric local binary pattern of every interior pixel.

    @param image: A C{GrayImage} of at least 3x3 pixels.
    @param t: The C{float} threshold. Bit p is set when
        neighbour p - neighbour (p + 4) >= t.
    @raise DimensionError: If the image is too small.
    @return: A C{CodeImage} of codes in the range 0 to 15.
    """
    _, ring = neighbours(image)
    codes = np.zeros(ring[0].shape, dtype=np.int64)
    for p in range(4):
        codes += ((ring[p] - ring[p + 4]) >= t).astype(np.int64) << p
    return CodeImage(codes, 1)


def ternary(difference: np.ndarray, t: float) -> np.ndarray:
    """
    Quantize differences to -1, 0 or +1 with a dead zone of half-width t.

    @param difference: A C{numpy} array of intensity differences.
    @param t: The C{float} threshold.
    @return: An C{int64} array holding -1 where C{difference < -t}, +1 where
        C{difference > t}, and 0 elsewhere.
    """
    return (difference > t).astype(np.int64) - (difference < -t).astype(np.int64)


def csltpCodeImage(image: GrayImage, t: float = 1.0) -> CodeImage:
    """
    Compute the centre-symmetric local ternary pattern of every interior pixel.

    The two diagonals are each compared top to bottom: s1 from the difference
    bottom-right minus top-left (neighbours 4 and 0) and s2 from bottom-left
    minus top-right (neighbours 6 and 2). The code is 3 * (s1 + 1) + (s2 + 1).

    @param image: A C{GrayImage} of at least 3x3 pixels.
    @param t: The C{float} threshold.
    @raise DimensionError: If the image is too small.
    @return: A C{CodeImage} of codes in the range 0 to 8.
    """
    _, ring = neighbours(image)
    s1 = ternary(ring[4] - ring[0], t)
    s2 = ternary(ring[6] - ring[2], t)
    return CodeImage(3 * (s1 + 1) + (s2 + 1), 1)


def lbpFeature(image: GrayImage) -> FeatureVector:
    """
    Compute the 256-bin LBP histogram of an image.

    @param image: A C{GrayImage} of at least 3x3 pixels.
    @raise DimensionError: If the image is too small.
    @return: A normalized C{FeatureVector}.
    """
    return FeatureVector("lbp", histogram(lbpCodeImage(image), LBP_BINS), LBP_BINS)


def cslbpFeature(image: GrayImage, t: float = 0.0) -> FeatureVector:
    """
    Compute the 16-bin CSLBP histogram of an image.

    @param image: A C{GrayImage} of at least 3x3 pixels.
    @param t: The C{float} threshold.
    @raise DimensionError: If the image is too small.
    @return: A normalized C{FeatureVector}.
    """
    return FeatureVector(
        "cslbp", histogram(cslbpCodeImage(image, t), CSLBP_BINS), CSLBP_BINS
    )


def csltpFeature(image: GrayImage, t: float = 1.0) -> FeatureVector:
    """
    Compute the 9-bin CSLTP histogram of an image.

    @param image: A C{GrayImage} of at least 3x3 pixels.
    @param t: The C{float} threshold.
    @raise DimensionError: If the image is too small.
    @return: A normalized C{FeatureVector}.
    """
    return FeatureVector(
        "csltp", histogram(csltpCodeImage(image, t), CSLTP_BINS), CSLTP_BINS
    )


def baselineFeature(image: GrayImage, config: BaselineConfig) -> FeatureVector:
    """
    Compute the feature of whichever baseline a config selects.

    @param image: A C{GrayImage} of at least 3x3 pixels.
    @param config: A C{BaselineConfig}.
    @return: A normalized C{FeatureVector}.
    """
    if config.kind == "lbp":
        return lbpFeature(image)
    elif config.kind == "cslbp":
        return cslbpFeature(image, config.effectiveThreshold)
    else:
        return csltpFeature(image, config.effectiveThreshold)

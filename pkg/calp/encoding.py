"""
The cascaded asymmetric local pattern (CALP) encoding.

Every interior pixel gets a 6-bit code at each ring distance D. The eight
ring pixels are the corners and edge midpoints of the (2D + 1) x (2D + 1)
square around the reference pixel:

    a  b  c
    l  .  r
    e  f  g

The three high bits compare the top row with the bottom row (a/e, b/f, c/g)
and the three low bits compare the left column with the right column (a/c,
l/r, e/g). A bit is 1 when the first pixel is strictly brighter than the
second. The reference pixel itself is never read.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import GrayImage
from .error import BoundsError, DimensionError, EmptyRegionError, ParameterError

CODE_COUNT = 64

# Primitive operations per encoded pixel and ring: 6 comparisons, 4 additions
# and 6 multiplications for the two weighted sums, and 1 addition joining them.
OPERATIONS_PER_PIXEL = 17


@dataclass(frozen=True)
class CalpConfig:
    """
    The depth of the CALP cascade.

    @param maxRadius: The C{int} largest ring distance R. Rings 1 to R are
        encoded.
    """

    maxRadius: int = 1

    def __post_init__(self) -> None:
        if self.maxRadius < 1:
            raise ParameterError(
                "The CALP radius must be at least 1 (got %r)." % self.maxRadius
            )


@dataclass(frozen=True)
class CodeImage:
    """
    Per-pixel codes over the interior of an image.

    @param codes: A 2-dimensional C{numpy} integer array of codes.
    @param distance: The C{int} ring distance the codes were computed at
        (0 for descriptors that have no notion of a ring distance).
    """

    codes: np.ndarray
    distance: int

    @property
    def height(self) -> int:
        return self.codes.shape[0]

    @property
    def width(self) -> int:
        return self.codes.shape[1]


@dataclass(frozen=True)
class FeatureVector:
    """
    A histogram feature, possibly the concatenation of several segments.

    @param name: The C{str} name of the descriptor that made the feature.
    @param bins: A 1-dimensional C{numpy} C{float64} array.
    @param segmentLength: The C{int} length of each normalized segment.
    """

    name: str
    bins: np.ndarray
    segmentLength: int

    def __len__(self) -> int:
        return len(self.bins)

    def segments(self) -> list[np.ndarray]:
        """
        Split the feature into its separately normalized histograms.

        @return: A C{list} of 1-dimensional C{numpy} arrays.
        """
        return [
            self.bins[start : start + self.segmentLength]
            for start in range(0, len(self.bins), self.segmentLength)
        ]


def encodeC(e: int, f: int) -> int:
    """
    The binary comparison at the heart of CALP.

    @param e: An C{int} intensity.
    @param f: An C{int} intensity.
    @return: 0 if C{e <= f}, else 1.
    """
    return 0 if e <= f else 1


def checkImageSize(image: GrayImage, distance: int) -> None:
    """
    Check an image has an interior at a given ring distance.

    @param image: A C{GrayImage}.
    @param distance: The C{int} ring distance.
    @raise DimensionError: If the image is smaller than
        (2 * distance + 1) x (2 * distance + 1).
    """
    size = 2 * distance + 1
    if image.height < size or image.width < size:
        raise DimensionError(
            "A %dx%d (height x width) image is too small for ring distance %d, "
            "which needs at least %dx%d."
            % (image.height, image.width, distance, size, size)
        )


def calpCode(image: GrayImage, i: int, j: int, d: int) -> int:
    """
    Compute the CALP code of a single pixel.

    @param image: A C{GrayImage}.
    @param i: The C{int} 1-based row of the reference pixel.
    @param j: The C{int} 1-based column of the reference pixel.
    @param d: The C{int} ring distance.
    @raise BoundsError: If the ring around (i, j) leaves the image.
    @return: The C{int} code, in the range 0 to 63.
    """
    height, width = image.pixels.shape
    if d < 1 or not (1 + d <= i <= height - d and 1 + d <= j <= width - d):
        raise BoundsError(
            "Pixel (%d, %d) at ring distance %d is outside the encodable interior "
            "of a %dx%d image." % (i, j, d, height, width)
        )

    def pixel(row: int, column: int) -> int:
        return int(image.pixels[row - 1, column - 1])

    horizontal = (
        32 * encodeC(pixel(i - d, j - d), pixel(i + d, j - d))
        + 16 * encodeC(pixel(i - d, j), pixel(i + d, j))
        + 8 * encodeC(pixel(i - d, j + d), pixel(i + d, j + d))
    )
    vertical = (
        4 * encodeC(pixel(i - d, j - d), pixel(i - d, j + d))
        + 2 * encodeC(pixel(i, j - d), pixel(i, j + d))
        + encodeC(pixel(i + d, j - d), pixel(i + d, j + d))
    )
    return horizontal + vertical


def ringViews(pixels: np.ndarray, d: int) -> dict[str, np.ndarray]:
    """
    Get the eight ring neighbours of every interior pixel as shifted views.

    @param pixels: A 2-dimensional C{numpy} array.
    @param d: The C{int} ring distance.
    @return: A C{dict} keyed by position ('a', 'b', 'c', 'l', 'r', 'e', 'f',
        'g', see the module docstring) whose values are views with the shape of
        the interior.
    """
    height, width = pixels.shape
    top = slice(0, height - 2 * d)
    middle = slice(d, height - d)
    bottom = slice(2 * d, height)
    left = slice(0, width - 2 * d)
    centre = slice(d, width - d)
    right = slice(2 * d, width)

    return {
        "a": pixels[top, left],
        "b": pixels[top, centre],
        "c": pixels[top, right],
        "l": pixels[middle, left],
        "r": pixels[middle, right],
        "e": pixels[bottom, left],
        "f": pixels[bottom, centre],
        "g": pixels[bottom, right],
    }


def calpCodeImage(image: GrayImage, d: int) -> CodeImage:
    """
    Compute the CALP code of every interior pixel at one ring distance.

    @param image: A C{GrayImage} of at least (2d + 1) x (2d + 1) pixels.
    @param d: The C{int} ring distance.
    @raise ParameterError: If C{d} is less than 1.
    @raise DimensionError: If the image is too small.
    @return: A C{CodeImage} of shape (height - 2d) x (width - 2d).
    """
    if d < 1:
        raise ParameterError("The ring distance must be at least 1 (got %r)." % d)
    checkImageSize(image, d)

    ring = ringViews(image.pixels, d)
    codes = np.zeros(ring["a"].shape, dtype=np.uint8)

    for weight, (first, second) in (
        (32, ("a", "e")),
        (16, ("b", "f")),
        (8, ("c", "g")),
        (4, ("a", "c")),
        (2, ("l", "r")),
        (1, ("e", "g")),
    ):
        codes += weight * (ring[first] > ring[second]).astype(np.uint8)

    return CodeImage(codes, d)


def histogram(codeImage: CodeImage, binCount: int) -> np.ndarray:
    """
    Compute the L1-normalized histogram of a code image.

    @param codeImage: A C{CodeImage}.
    @param binCount: The C{int} number of possible codes.
    @raise EmptyRegionError: If the code image has no pixels.
    @return: A C{float64} C{numpy} array of length C{binCount}, summing to 1.
    """
    codes = codeImage.codes.ravel()
    if codes.size == 0:
        raise EmptyRegionError("Cannot make a histogram from an empty code image.")
    counts = np.bincount(codes, minlength=binCount)
    return counts / codes.size


def calpHistogram(codeImage: CodeImage) -> np.ndarray:
    """
    Compute the 64-bin normalized histogram of a CALP code image.

    @param codeImage: A C{CodeImage} of CALP codes.
    @raise EmptyRegionError: If the code image has no pixels.
    @return: A C{float64} C{numpy} array of length 64.
    """
    return histogram(codeImage, CODE_COUNT)


def calpFeature(image: GrayImage, config: Optional[CalpConfig] = None) -> FeatureVector:
    """
    Compute the cascaded CALP feature of an image.

    @param image: A C{GrayImage}.
    @param config: A C{CalpConfig}, or C{None} for a single ring.
    @raise DimensionError: If the image is too small for the largest ring.
    @return: A C{FeatureVector} holding the 64-bin histograms for ring
        distances 1 to R, in that order.
    """
    config = config or CalpConfig()
    checkImageSize(image, config.maxRadius)
    bins = np.concatenate(
        [
            calpHistogram(calpCodeImage(image, d))
            for d in range(1, config.maxRadius + 1)
        ]
    )
    return FeatureVector("calp", bins, CODE_COUNT)


def renderFeatureImage(
    codeImage: CodeImage, maxCode: int = CODE_COUNT - 1
) -> GrayImage:
    """
    Scale a code image to display intensities.

    @param codeImage: A non-empty C{CodeImage}.
    @param maxCode: The C{int} largest possible code, which maps to 255.
    @raise EmptyRegionError: If the code image has no pixels.
    @return: A C{GrayImage} with each code c replaced by round(c * 255 / maxCode).
    """
    if codeImage.codes.size == 0:
        raise EmptyRegionError("Cannot render an empty code image.")
    scaled = np.floor(codeImage.codes.astype(np.float64) * 255.0 / maxCode + 0.5)
    return GrayImage(scaled.astype(np.uint8))


def calpOperationCount(height: int, width: int, maxRadius: int) -> int:
    """
    Count the primitive operations needed to encode an image.

    @param height: The C{int} image height.
    @param width: The C{int} image width.
    @param maxRadius: The C{int} cascade depth R.
    @return: The C{int} number of primitive operations used to compute the
        codes of all interior pixels at ring distances 1 to R.
    """
    return sum(
        OPERATIONS_PER_PIXEL * max(0, height - 2 * d) * max(0, width - 2 * d)
        for d in range(1, maxRadius + 1)
    )

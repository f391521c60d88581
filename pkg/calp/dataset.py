import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Protocol, Sequence, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .error import (
    DatasetError,
    DimensionError,
    ImageFormatError,
    ImageReadError,
    ParameterError,
)
from .utils import roundHalfUp

logger = logging.getLogger(__name__)

# ITU-R BT.601 luma weights for red, green and blue.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

SUPPORTED_MODES = {"L", "RGB"}

MAX_SEED = 2**64


@dataclass(frozen=True)
class GrayImage:
    """
    A grid of 8-bit intensities.

    @param pixels: A 2-dimensional C{numpy} array of C{uint8}, with shape
        (height, width). Row-major, as numpy stores it.
    """

    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.pixels.ndim != 2:
            raise DimensionError(
                "A gray image must be 2-dimensional, not %d-dimensional."
                % self.pixels.ndim
            )
        if self.pixels.dtype != np.uint8:
            raise ImageFormatError(
                "Gray image pixels must be of type uint8, not %s." % self.pixels.dtype
            )

    @classmethod
    def fromRows(cls, rows: Iterable[Iterable[int]]) -> "GrayImage":
        """
        Make an image from nested rows of intensities.

        @param rows: An iterable of rows, each an iterable of C{int}s in the
            range 0 to 255.
        @raise ImageFormatError: If an intensity is out of range.
        @return: A C{GrayImage}.
        """
        array = np.array([list(row) for row in rows], dtype=np.int64)
        if array.size and (array.min() < 0 or array.max() > 255):
            raise ImageFormatError(
                "Intensities must be in the range 0 to 255 (found %d to %d)."
                % (array.min(), array.max())
            )
        return cls(array.astype(np.uint8))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def rgbToGray(rgb: np.ndarray) -> np.ndarray:
    """
    Convert RGB pixels to luma, rounding halves up.

    @param rgb: A C{numpy} array of shape (height, width, 3) of 8-bit values.
    @return: A C{uint8} array of shape (height, width).
    """
    weights = np.array(LUMA_WEIGHTS)
    luma = rgb.astype(np.float64) @ weights
    return np.floor(luma + 0.5).clip(0, 255).astype(np.uint8)


def loadImage(path: Union[str, Path]) -> GrayImage:
    """
    Read an image file and convert it to grayscale.

    @param path: The C{str} or C{Path} of an 8-bit grayscale or RGB image in
        any container Pillow can decode (PNG, JPEG, PPM, ...).
    @raise ImageReadError: If the file cannot be opened or decoded, or is too
        large for Pillow to open safely.
    @raise ImageFormatError: If the pixel format is not 8-bit gray or RGB.
    @return: A C{GrayImage}.
    """
    try:
        with Image.open(path) as image:
            mode = image.mode
            if mode not in SUPPORTED_MODES:
                raise ImageFormatError(
                    "Image %r has unsupported pixel format %r (only 8-bit "
                    "grayscale and RGB images can be used)." % (str(path), mode)
                )
            array = np.asarray(image)
    except (OSError, UnidentifiedImageError, Image.DecompressionBombError) as e:
        raise ImageReadError("Could not read image %r (%s)." % (str(path), e))

    if mode == "RGB":
        return GrayImage(rgbToGray(array))
    else:
        return GrayImage(np.array(array, dtype=np.uint8))


def saveImage(image: GrayImage, path: Union[str, Path]) -> None:
    """
    Write a gray image to a file, whose format is taken from its suffix.

    @param image: The C{GrayImage} to write.
    @param path: The C{str} or C{Path} to write to.
    @raise ImageReadError: If the file cannot be written.
    """
    try:
        Image.fromarray(image.pixels).save(path)
    except (OSError, ValueError) as e:
        raise ImageReadError("Could not write image %r (%s)." % (str(path), e))


@dataclass(frozen=True)
class ImageClass:
    """
    The images of one class, in file name order.
    """

    label: str
    paths: tuple[Path, ...]
    images: tuple[GrayImage, ...]


@dataclass(frozen=True)
class Dataset:
    """
    A labeled image corpus.

    @param root: The C{Path} of the corpus directory.
    @param classes: A C{tuple} of C{ImageClass} instances, ordered by label.
    @param skipped: A C{tuple} of C{Path}s of files that could not be decoded.
    """

    root: Path
    classes: tuple[ImageClass, ...]
    skipped: tuple[Path, ...] = ()

    def __post_init__(self) -> None:
        if not self.classes:
            raise DatasetError("A dataset must have at least one class.")
        labels = [imageClass.label for imageClass in self.classes]
        if len(set(labels)) != len(labels):
            raise DatasetError("Dataset class labels are not unique: %r." % labels)
        for imageClass in self.classes:
            if not imageClass.images:
                raise DatasetError("Class %r has no images." % imageClass.label)

    @property
    def classCount(self) -> int:
        return len(self.classes)

    @property
    def imageCount(self) -> int:
        return sum(len(imageClass.images) for imageClass in self.classes)

    @property
    def labels(self) -> list[str]:
        """
        The class label of every image, in dataset order.
        """
        return [
            imageClass.label
            for imageClass in self.classes
            for _ in imageClass.images
        ]

    @property
    def paths(self) -> list[Path]:
        return [path for imageClass in self.classes for path in imageClass.paths]

    @property
    def images(self) -> list[GrayImage]:
        return [image for imageClass in self.classes for image in imageClass.images]

    @property
    def classSizes(self) -> dict[str, int]:
        return {imageClass.label: len(imageClass.images) for imageClass in self.classes}

    def relativePaths(self) -> list[str]:
        """
        Get the image paths relative to the dataset root, in POSIX form.

        @return: A C{list} of C{str} paths, in dataset order.
        """
        return [path.relative_to(self.root).as_posix() for path in self.paths]


def _tryLoad(path: Path) -> Optional[GrayImage]:
    try:
        return loadImage(path)
    except (ImageReadError, ImageFormatError) as e:
        logger.warning("Skipping %s: %s", path, e)
        return None


def scanDataset(root: Union[str, Path], workers: int = 1) -> Dataset:
    """
    Read a directory-per-class image corpus.

    Each immediate subdirectory of C{root} is a class whose label is the
    subdirectory name. Files within a class directory are read in lexicographic
    file name order. Files that cannot be decoded as images are skipped (and
    counted), as are class directories left without any image.

    @param root: The C{str} or C{Path} corpus directory.
    @param workers: The C{int} number of threads to decode images with. The
        result does not depend on this.
    @raise DatasetError: If C{root} is not a directory, has no class
        subdirectories, or holds no decodable image.
    @return: A C{Dataset}.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError("Dataset root %r is not a directory." % str(root))

    classDirs = sorted(
        (path for path in root.iterdir() if path.is_dir()), key=lambda p: p.name
    )
    if not classDirs:
        raise DatasetError("Dataset root %r has no class subdirectories." % str(root))

    filesByClass = [
        (
            classDir.name,
            sorted(
                (path for path in classDir.iterdir() if path.is_file()),
                key=lambda p: p.name,
            ),
        )
        for classDir in classDirs
    ]

    allFiles = [path for _, files in filesByClass for path in files]
    # Executor.map returns results in submission order, whatever the order in
    # which the threads finish.
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        loaded = dict(zip(allFiles, executor.map(_tryLoad, allFiles)))

    classes = []
    skipped = []
    for label, files in filesByClass:
        paths = []
        images = []
        for path in files:
            image = loaded[path]
            if image is None:
                skipped.append(path)
            else:
                paths.append(path)
                images.append(image)
        if images:
            classes.append(ImageClass(label, tuple(paths), tuple(images)))
        else:
            logger.warning("Class directory %s holds no decodable images.", label)

    if not classes:
        raise DatasetError("No decodable images were found under %r." % str(root))

    dataset = Dataset(root, tuple(classes), tuple(skipped))
    logger.info(
        "Read %d image%s in %d class%s from %s (%d file%s skipped).",
        dataset.imageCount,
        "" if dataset.imageCount == 1 else "s",
        dataset.classCount,
        "" if dataset.classCount == 1 else "es",
        root,
        len(skipped),
        "" if len(skipped) == 1 else "s",
    )
    return dataset


class Labeled(Protocol):
    """
    Anything that gives a class label for each of its images.
    """

    @property
    def labels(self) -> Sequence[str]:
        ...


@dataclass(frozen=True)
class Split:
    """
    A partition of dataset image indices into probe and gallery sets.
    """

    probe: frozenset[int]
    gallery: frozenset[int]
    probeFraction: float
    seed: int
    foldIndex: int

    def sortedProbe(self) -> list[int]:
        return sorted(self.probe)

    def sortedGallery(self) -> list[int]:
        return sorted(self.gallery)


def classIndices(labels: Sequence[str]) -> dict[str, list[int]]:
    """
    Group image indices by class label.

    @param labels: A sequence of C{str} labels, one per image.
    @return: A C{dict} mapping each label to the ascending C{list} of indices
        of its images. Keys are in order of first appearance.
    """
    result: dict[str, list[int]] = {}
    for index, label in enumerate(labels):
        result.setdefault(label, []).append(index)
    return result


def checkFraction(probeFraction: float) -> None:
    """
    Check a probe fraction is strictly between 0 and 1.

    @param probeFraction: The C{float} fraction to check.
    @raise ParameterError: If C{probeFraction} is out of range.
    """
    if not 0.0 < probeFraction < 1.0:
        raise ParameterError(
            "Probe fraction %r is not strictly between 0 and 1." % probeFraction
        )


def checkSeed(seed: int) -> None:
    if not 0 <= seed < MAX_SEED:
        raise ParameterError("Seed %r is not a 64-bit unsigned integer." % seed)


def probeCount(probeFraction: float, classSize: int) -> int:
    """
    How many images of a class go to the probe set?

    @param probeFraction: The C{float} fraction of images to use as probes.
    @param classSize: The C{int} number of images in the class.
    @return: The C{int} probe count, never more than C{classSize - 1} so that
        every class keeps at least one gallery image.
    """
    return max(0, min(roundHalfUp(probeFraction * classSize), classSize - 1))


def makeSplits(
    dataset: Labeled, probeFraction: float, folds: int, seed: int
) -> list[Split]:
    """
    Make seeded, class-stratified probe/gallery splits.

    @param dataset: A C{Dataset} (or anything with per-image C{labels}).
    @param probeFraction: The C{float} fraction of each class to use as probes.
    @param folds: The C{int} number of splits to make.
    @param seed: The C{int} 64-bit unsigned seed. Fold k is drawn with a
        generator seeded from (seed, k), so each fold is reproducible on its
        own.
    @raise ParameterError: If an argument is out of range.
    @return: A C{list} of C{folds} C{Split} instances.
    """
    checkFraction(probeFraction)
    checkSeed(seed)
    if folds < 1:
        raise ParameterError("The number of folds (%r) must be at least 1." % folds)

    byClass = classIndices(dataset.labels)
    everything = frozenset(range(len(dataset.labels)))
    splits = []

    for foldIndex in range(folds):
        rng = np.random.default_rng([seed, foldIndex])
        probe: set[int] = set()
        for indices in byClass.values():
            count = probeCount(probeFraction, len(indices))
            if count:
                chosen = rng.permutation(len(indices))[:count]
                probe.update(indices[i] for i in chosen)
        probeSet = frozenset(probe)
        splits.append(
            Split(probeSet, everything - probeSet, probeFraction, seed, foldIndex)
        )

    return splits

import os
from dataclasses import dataclass
from pathlib import Path
from tempfile import mkstemp
from typing import Optional, Union

import numpy as np

from .dataset import Dataset
from .descriptors import DescriptorConfig, extractAll
from .error import FeatureStoreError, ParameterError
from .matching import FeatureSet
from .utils import formatFloat

FORMAT_VERSION = "1"

HEADER_KEYS = (
    "formatVersion",
    "descriptor",
    "radius",
    "threshold",
    "bins",
    "root",
    "images",
    "skipped",
)


@dataclass(frozen=True)
class FeatureStore:
    """
    Features of every image of a corpus, with the parameters that made them.

    A store is saved as tab-separated text. Header lines start with '#' and
    hold key=value pairs; each following line holds an image path (relative to
    the corpus root), its class label, and its bin values written so that they
    read back exactly.

    @param descriptor: The C{DescriptorConfig} the features were made with.
    @param root: The C{str} corpus root directory. Stores made from a dataset
        record it as an absolute path.
    @param paths: A C{tuple} of unique C{str} relative image paths.
    @param labels: A C{tuple} of C{str} class labels.
    @param vectors: A 2-dimensional C{float64} C{numpy} array of features.
    @param skipped: The C{int} number of corpus files that could not be read.
    """

    descriptor: DescriptorConfig
    root: str
    paths: tuple[str, ...]
    labels: tuple[str, ...]
    vectors: np.ndarray
    skipped: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(self.paths))
        object.__setattr__(self, "labels", tuple(self.labels))
        count = len(self.paths)
        if len(self.labels) != count or len(self.vectors) != count:
            raise FeatureStoreError(
                "A feature store needs the same number of paths (%d), labels (%d) "
                "and vectors (%d)." % (count, len(self.labels), len(self.vectors))
            )
        if len(set(self.paths)) != count:
            raise FeatureStoreError("Feature store image paths are not unique.")
        bins = self.descriptor.featureLength()
        if count and self.vectors.shape[1] != bins:
            raise FeatureStoreError(
                "Feature store vectors have %d bins, but %s features have %d."
                % (self.vectors.shape[1], self.descriptor, bins)
            )
        for text in self.paths + self.labels:
            if "\t" in text or "\n" in text:
                raise FeatureStoreError(
                    "Image paths and class labels cannot contain tabs or "
                    "newlines (found %r)." % text
                )

    @classmethod
    def fromDataset(
        cls, dataset: Dataset, descriptor: DescriptorConfig, workers: int = 1
    ) -> "FeatureStore":
        """
        Extract the features of every image of a dataset.

        @param dataset: A C{Dataset}.
        @param descriptor: The C{DescriptorConfig} to use.
        @param workers: The C{int} number of extraction threads.
        @raise DimensionError: If an image is too small for the descriptor.
        @return: A C{FeatureStore} whose records are in dataset order (class
            label, then file name).
        """
        return cls(
            descriptor,
            str(Path(dataset.root).resolve()),
            tuple(dataset.relativePaths()),
            tuple(dataset.labels),
            extractAll(dataset.images, descriptor, workers),
            len(dataset.skipped),
        )

    def __len__(self) -> int:
        return len(self.paths)

    def featureSet(self) -> FeatureSet:
        return FeatureSet(self.vectors, self.labels, self.paths)

    def index(self, path: str) -> Optional[int]:
        """
        Find a stored image.

        @param path: The C{str} relative path of an image.
        @return: The C{int} record index, or C{None} if C{path} is not stored.
        """
        try:
            return self.paths.index(path)
        except ValueError:
            return None

    def header(self) -> dict[str, str]:
        threshold = self.descriptor.effectiveThreshold
        return {
            "formatVersion": FORMAT_VERSION,
            "descriptor": self.descriptor.name,
            "radius": str(self.descriptor.radius),
            "threshold": "none" if threshold is None else formatFloat(threshold),
            "bins": str(self.descriptor.featureLength()),
            "root": self.root,
            "images": str(len(self)),
            "skipped": str(self.skipped),
        }

    def toStr(self) -> str:
        """
        Get the text form of the store.

        @return: A C{str} with LF line endings.
        """
        lines = ["#%s=%s" % item for item in self.header().items()]
        for path, label, vector in zip(self.paths, self.labels, self.vectors):
            lines.append("\t".join([path, label] + [formatFloat(x) for x in vector]))
        return "\n".join(lines) + "\n"

    def write(self, filename: Union[str, Path]) -> None:
        """
        Save the store. The file is written in full or not at all.

        @param filename: The C{str} or C{Path} file to write.
        @raise FeatureStoreError: If the file cannot be written.
        """
        filename = Path(filename)
        text = self.toStr()
        try:
            fd, tmp = mkstemp(
                prefix=".%s-" % filename.name, suffix=".tmp", dir=filename.parent
            )
        except OSError as e:
            raise FeatureStoreError(
                "Could not write feature store %r (%s)." % (str(filename), e)
            )
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fp:
                fp.write(text)
            os.replace(tmp, filename)
        except OSError as e:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise FeatureStoreError(
                "Could not write feature store %r (%s)." % (str(filename), e)
            )

    @classmethod
    def read(cls, filename: Union[str, Path]) -> "FeatureStore":
        """
        Load a saved store.

        @param filename: The C{str} or C{Path} file to read.
        @raise FeatureStoreError: If the file cannot be read or is malformed.
        @return: A C{FeatureStore}. A relative corpus root in the header is
            taken to be relative to the directory holding C{filename}.
        """
        try:
            with open(filename, encoding="utf-8") as fp:
                lines = fp.read().split("\n")
        except OSError as e:
            raise FeatureStoreError(
                "Could not read feature store %r (%s)." % (str(filename), e)
            )

        if lines and lines[-1] == "":
            lines.pop()

        header: dict[str, str] = {}
        count = 0
        for count, line in enumerate(lines):
            # Record paths may also start with '#'.
            if not line.startswith("#") or all(key in header for key in HEADER_KEYS):
                break
            key, sep, value = line[1:].partition("=")
            if not sep:
                raise FeatureStoreError(
                    "Header line %d of feature store %r is not of the form "
                    "#key=value." % (count + 1, str(filename))
                )
            header[key] = value
        else:
            count = len(lines)

        missing = [key for key in HEADER_KEYS if key not in header]
        if missing:
            raise FeatureStoreError(
                "Feature store %r has no %s header."
                % (str(filename), ", ".join(missing))
            )
        if header["formatVersion"] != FORMAT_VERSION:
            raise FeatureStoreError(
                "Feature store %r has format version %r, but only version %s "
                "can be read."
                % (str(filename), header["formatVersion"], FORMAT_VERSION)
            )

        try:
            descriptor = DescriptorConfig(
                header["descriptor"],
                int(header["radius"]),
                None if header["threshold"] == "none" else float(header["threshold"]),
            )
            bins = int(header["bins"])
            images = int(header["images"])
            skipped = int(header["skipped"])
        except (ParameterError, ValueError) as e:
            raise FeatureStoreError(
                "Feature store %r has an invalid header (%s)." % (str(filename), e)
            )

        if bins != descriptor.featureLength():
            raise FeatureStoreError(
                "Feature store %r header gives %d bins, but %s features have %d."
                % (str(filename), bins, descriptor, descriptor.featureLength())
            )

        paths = []
        labels = []
        rows = []
        for lineNumber, line in enumerate(lines[count:], start=count + 1):
            fields = line.split("\t")
            if len(fields) != bins + 2:
                raise FeatureStoreError(
                    "Line %d of feature store %r has %d fields (expected %d)."
                    % (lineNumber, str(filename), len(fields), bins + 2)
                )
            try:
                rows.append([float(field) for field in fields[2:]])
            except ValueError as e:
                raise FeatureStoreError(
                    "Line %d of feature store %r has a bad bin value (%s)."
                    % (lineNumber, str(filename), e)
                )
            paths.append(fields[0])
            labels.append(fields[1])

        if len(paths) != images:
            raise FeatureStoreError(
                "Feature store %r header gives %d images, but %d records were "
                "found."
                % (str(filename), images, len(paths))
            )

        root = Path(header["root"])
        if not root.is_absolute():
            root = (Path(filename).parent / root).resolve()

        vectors = np.array(rows, dtype=np.float64).reshape(len(rows), bins)
        return cls(descriptor, str(root), tuple(paths), tuple(labels), vectors, skipped)

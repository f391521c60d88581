import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .baselines import (
    CSLBP_BINS,
    CSLTP_BINS,
    LBP_BINS,
    BaselineConfig,
    baselineFeature,
)
from .dataset import GrayImage
from .encoding import CODE_COUNT, CalpConfig, FeatureVector, calpFeature
from .error import ParameterError

logger = logging.getLogger(__name__)

DESCRIPTOR_NAMES = ("calp", "lbp", "cslbp", "csltp")


@dataclass(frozen=True)
class DescriptorConfig:
    """
    Select a descriptor and its parameters.

    @param name: One of 'calp', 'lbp', 'cslbp' or 'csltp'.
    @param radius: The C{int} CALP cascade depth R. Ignored by the baselines.
    @param threshold: The C{float} CSLBP/CSLTP threshold, or C{None} for the
        descriptor's default. Ignored by CALP and LBP.
    """

    name: str = "calp"
    radius: int = 3
    threshold: Optional[float] = None

    def __post_init__(self) -> None:
        if self.name not in DESCRIPTOR_NAMES:
            raise ParameterError(
                "Unknown descriptor %r (known: %s)."
                % (self.name, ", ".join(DESCRIPTOR_NAMES))
            )
        if self.name == "calp":
            CalpConfig(self.radius)
        else:
            BaselineConfig(self.name, self.threshold)

    @property
    def effectiveThreshold(self) -> Optional[float]:
        """
        The threshold the descriptor will actually use, or C{None} if it
        does not use one.
        """
        if self.name in ("calp", "lbp"):
            return None
        else:
            return BaselineConfig(self.name, self.threshold).effectiveThreshold

    def featureLength(self) -> int:
        """
        Get the number of bins in this descriptor's features.

        @return: An C{int} bin count.
        """
        return {
            "calp": CODE_COUNT * self.radius,
            "lbp": LBP_BINS,
            "cslbp": CSLBP_BINS,
            "csltp": CSLTP_BINS,
        }[self.name]

    def bits(self) -> Optional[int]:
        """
        Get the number of bits in this descriptor's micropattern.

        @return: An C{int} bit count, or C{None} for CSLTP whose ternary codes
            have no bit length.
        """
        return {
            "calp": 6 * self.radius,
            "lbp": 8,
            "cslbp": 4,
            "csltp": None,
        }[self.name]

    def extract(self, image: GrayImage) -> FeatureVector:
        """
        Compute this descriptor's feature for an image.

        @param image: A C{GrayImage}.
        @raise DimensionError: If the image is too small.
        @return: A C{FeatureVector}.
        """
        if self.name == "calp":
            return calpFeature(image, CalpConfig(self.radius))
        else:
            return baselineFeature(image, BaselineConfig(self.name, self.threshold))

    def label(self) -> str:
        """
        A short display name, e.g. "CALP (R=3)" or "CSLBP".
        """
        if self.name == "calp":
            return "CALP (R=%d)" % self.radius
        else:
            return self.name.upper()

    def __str__(self) -> str:
        threshold = self.effectiveThreshold
        if threshold is None:
            return self.label()
        else:
            return "%s (T=%g)" % (self.label(), threshold)


def extractAll(
    images: Sequence[GrayImage], config: DescriptorConfig, workers: int = 1
) -> np.ndarray:
    """
    Compute features for many images.

    @param images: A sequence of C{GrayImage}s.
    @param config: The C{DescriptorConfig} to use.
    @param workers: The C{int} number of threads to use. The result does not
        depend on this.
    @raise DimensionError: If any image is too small.
    @return: A C{float64} C{numpy} array with one row per image, in the order
        of C{images}.
    """
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        features = list(executor.map(config.extract, images))

    logger.info(
        "Extracted %s features (%d bins) from %d image%s.",
        config,
        config.featureLength(),
        len(features),
        "" if len(features) == 1 else "s",
    )

    if features:
        return np.vstack([feature.bins for feature in features])
    else:
        return np.zeros((0, config.featureLength()))


def descriptorTable(maxRadius: int = 3) -> list[tuple[str, Optional[int], int]]:
    """
    Tabulate micropattern bit counts and feature lengths.

    @param maxRadius: The C{int} largest CALP radius to include.
    @return: A C{list} of (descriptor, bits, bins) C{tuple}s: the three
        baselines followed by CALP for R = 1 to C{maxRadius}.
    """
    configs = [DescriptorConfig(name) for name in ("lbp", "cslbp", "csltp")]
    configs.extend(
        DescriptorConfig("calp", radius) for radius in range(1, maxRadius + 1)
    )
    return [
        (config.label(), config.bits(), config.featureLength()) for config in configs
    ]


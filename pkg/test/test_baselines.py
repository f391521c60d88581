from unittest import TestCase

import numpy as np

from calp.baselines import (
    NEIGHBOUR_OFFSETS,
    BaselineConfig,
    baselineFeature,
    cslbpCodeImage,
    cslbpFeature,
    csltpCodeImage,
    csltpFeature,
    lbpCodeImage,
    lbpFeature,
)
from calp.dataset import GrayImage
from calp.error import DimensionError, ParameterError


def randomImage(seed: int) -> GrayImage:
    rng = np.random.default_rng(seed)
    return GrayImage(rng.integers(0, 256, (16, 16), dtype=np.uint8))


def ringValues(pixels: list[list[int]], i: int, j: int) -> list[int]:
    return [pixels[i + dRow][j + dColumn] for dRow, dColumn in NEIGHBOUR_OFFSETS]


def naive(image: GrayImage, code) -> list[list[int]]:
    """
    Apply a per-pixel code function to every interior pixel.
    """
    p = image.pixels.tolist()
    return [
        [code(p[i][j], ringValues(p, i, j)) for j in range(1, image.width - 1)]
        for i in range(1, image.height - 1)
    ]


def ternaryValue(difference: int, t: float) -> int:
    if difference > t:
        return 1
    elif difference < -t:
        return -1
    else:
        return 0


def neighbourhood(centre: int, ring: list[int]) -> GrayImage:
    """
    Make a 3x3 image from a centre value and eight clockwise neighbours.
    """
    pixels = np.full((3, 3), centre, dtype=np.uint8)
    for value, (dRow, dColumn) in zip(ring, NEIGHBOUR_OFFSETS):
        pixels[1 + dRow, 1 + dColumn] = value
    return GrayImage(pixels)


class TestBaselineConfig(TestCase):
    """
    Tests for the BaselineConfig class.
    """

    def testUnknownKind(self):
        """
        An unknown descriptor kind must cause a ParameterError.
        """
        self.assertRaisesRegex(
            ParameterError, "Unknown baseline descriptor 'slbp'", BaselineConfig, "slbp"
        )

    def testNegativeThreshold(self):
        """
        A negative threshold must cause a ParameterError.
        """
        error = r"^The threshold must not be negative \(got -1\)\.$"
        self.assertRaisesRegex(ParameterError, error, BaselineConfig, "cslbp", -1)

    def testDefaults(self):
        """
        The default thresholds must be 0 for CSLBP and 1 for CSLTP.
        """
        self.assertEqual(0.0, BaselineConfig("cslbp").effectiveThreshold)
        self.assertEqual(1.0, BaselineConfig("csltp").effectiveThreshold)

    def testGivenThreshold(self):
        """
        A given threshold must override the default.
        """
        self.assertEqual(3.0, BaselineConfig("csltp", 3.0).effectiveThreshold)


class TestLBP(TestCase):
    """
    Tests for the LBP descriptor.
    """

    def testConstant(self):
        """
        A constant neighbourhood must give code 255.
        """
        image = GrayImage(np.full((3, 3), 8, dtype=np.uint8))
        self.assertEqual([[255]], lbpCodeImage(image).codes.tolist())

    def testBrightCentre(self):
        """
        A centre of 255 with dark neighbours must give code 0.
        """
        image = neighbourhood(255, [0] * 8)
        self.assertEqual([[0]], lbpCodeImage(image).codes.tolist())

    def testSingleNeighbour(self):
        """
        Only neighbour p being at least as bright as the centre must give
        code 2^p.
        """
        for p in range(8):
            ring = [0] * 8
            ring[p] = 100
            image = neighbourhood(100, ring)
            self.assertEqual([[1 << p]], lbpCodeImage(image).codes.tolist())

    def testOracle(self):
        """
        The codes of random images must match a per-pixel evaluation.
        """

        def code(centre, ring):
            return sum(1 << p for p, value in enumerate(ring) if value >= centre)

        for seed in range(20):
            image = randomImage(seed)
            self.assertEqual(naive(image, code), lbpCodeImage(image).codes.tolist())

    def testLength(self):
        """
        The LBP feature must have 256 bins summing to 1.
        """
        feature = lbpFeature(randomImage(1))
        self.assertEqual(256, len(feature))
        self.assertAlmostEqual(1.0, feature.bins.sum(), delta=1e-9)

    def testTooSmall(self):
        """
        A 2x2 image must cause a DimensionError.
        """
        image = GrayImage(np.zeros((2, 2), dtype=np.uint8))
        self.assertRaises(DimensionError, lbpFeature, image)


class TestCSLBP(TestCase):
    """
    Tests for the CSLBP descriptor.
    """

    def testConstant(self):
        """
        A constant neighbourhood with threshold 0 must give code 15.
        """
        image = GrayImage(np.full((3, 3), 8, dtype=np.uint8))
        self.assertEqual([[15]], cslbpCodeImage(image, 0).codes.tolist())

    def testAboveThreshold(self):
        """
        Pairs with g_p = g_(p+4) + t + 1 must give code 15.
        """
        t = 5
        image = neighbourhood(50, [100 + t + 1] * 4 + [100] * 4)
        self.assertEqual([[15]], cslbpCodeImage(image, t).codes.tolist())

    def testBelowThreshold(self):
        """
        Pairs with g_p = g_(p+4) - t - 1 must give code 0.
        """
        t = 5
        image = neighbourhood(50, [100 - t - 1] * 4 + [100] * 4)
        self.assertEqual([[0]], cslbpCodeImage(image, t).codes.tolist())

    def testOracle(self):
        """
        The codes of random images must match a per-pixel evaluation.
        """
        t = 3

        def code(centre, ring):
            return sum(1 << p for p in range(4) if ring[p] - ring[p + 4] >= t)

        for seed in range(20):
            image = randomImage(seed)
            self.assertEqual(
                naive(image, code), cslbpCodeImage(image, t).codes.tolist()
            )

    def testShiftInvariance(self):
        """
        Adding a constant to every pixel must leave the codes unchanged.
        """
        image = GrayImage((randomImage(2).pixels // 2).astype(np.uint8))
        shifted = GrayImage(image.pixels + 100)
        self.assertTrue(
            np.array_equal(
                cslbpCodeImage(image, 2).codes, cslbpCodeImage(shifted, 2).codes
            )
        )

    def testLength(self):
        """
        The CSLBP feature must have 16 bins summing to 1.
        """
        feature = cslbpFeature(randomImage(3))
        self.assertEqual(16, len(feature))
        self.assertAlmostEqual(1.0, feature.bins.sum(), delta=1e-9)


class TestCSLTP(TestCase):
    """
    Tests for the CSLTP descriptor.
    """

    def testConstant(self):
        """
        A constant neighbourhood must give code 4.
        """
        image = GrayImage(np.full((3, 3), 8, dtype=np.uint8))
        self.assertEqual([[4]], csltpCodeImage(image).codes.tolist())

    def testIncreasing(self):
        """
        Both diagonals increasing (top to bottom) beyond the threshold must
        give code 8.
        """
        image = GrayImage.fromRows([[10, 20, 30], [40, 50, 60], [70, 80, 90]])
        self.assertEqual([[8]], csltpCodeImage(image, 1).codes.tolist())

    def testDecreasing(self):
        """
        Both diagonals decreasing beyond the threshold must give code 0.
        """
        image = GrayImage.fromRows([[90, 80, 70], [60, 50, 40], [30, 20, 10]])
        self.assertEqual([[0]], csltpCodeImage(image, 1).codes.tolist())

    def testWithinThreshold(self):
        """
        Differences no bigger than the threshold must count as equal.
        """
        image = GrayImage.fromRows([[10, 0, 12], [0, 0, 0], [10, 0, 12]])
        self.assertEqual([[4]], csltpCodeImage(image, 2).codes.tolist())

    def testOracle(self):
        """
        The codes of random images must match a per-pixel evaluation.
        """
        t = 4

        def code(centre, ring):
            s1 = ternaryValue(ring[4] - ring[0], t)
            s2 = ternaryValue(ring[6] - ring[2], t)
            return 3 * (s1 + 1) + (s2 + 1)

        for seed in range(20):
            image = randomImage(seed)
            self.assertEqual(
                naive(image, code), csltpCodeImage(image, t).codes.tolist()
            )

    def testLength(self):
        """
        The CSLTP feature must have 9 bins summing to 1.
        """
        feature = csltpFeature(randomImage(4))
        self.assertEqual(9, len(feature))
        self.assertAlmostEqual(1.0, feature.bins.sum(), delta=1e-9)


class TestBaselineFeature(TestCase):
    """
    Tests for the baselineFeature function.
    """

    def testDispatch(self):
        """
        Each kind must give the feature of its descriptor.
        """
        image = randomImage(5)
        self.assertTrue(
            np.array_equal(
                cslbpFeature(image, 2.0).bins,
                baselineFeature(image, BaselineConfig("cslbp", 2.0)).bins,
            )
        )
        self.assertEqual(
            "csltp", baselineFeature(image, BaselineConfig("csltp")).name
        )
        self.assertEqual(256, len(baselineFeature(image, BaselineConfig("lbp"))))

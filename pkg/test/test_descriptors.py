from unittest import TestCase

import numpy as np

from calp.dataset import GrayImage
from calp.descriptors import DescriptorConfig, descriptorTable, extractAll
from calp.encoding import CalpConfig, calpFeature
from calp.error import DimensionError, ParameterError


def randomImages(count: int, size: int = 16) -> list[GrayImage]:
    rng = np.random.default_rng(count)
    return [
        GrayImage(rng.integers(0, 256, (size, size), dtype=np.uint8))
        for _ in range(count)
    ]


class TestDescriptorConfig(TestCase):
    """
    Tests for the DescriptorConfig class.
    """

    def testFeatureLengths(self):
        """
        Feature lengths must be 64 * R for CALP, 256 for LBP, 16 for CSLBP
        and 9 for CSLTP, whether computed or extracted.
        """
        (image,) = randomImages(1)
        for config, length in (
            (DescriptorConfig("calp", 1), 64),
            (DescriptorConfig("calp", 2), 128),
            (DescriptorConfig("calp", 3), 192),
            (DescriptorConfig("lbp"), 256),
            (DescriptorConfig("cslbp"), 16),
            (DescriptorConfig("csltp"), 9),
        ):
            self.assertEqual(length, config.featureLength())
            self.assertEqual(length, len(config.extract(image)))

    def testUnknownName(self):
        """
        An unknown descriptor name must cause a ParameterError.
        """
        error = r"^Unknown descriptor 'ldgp' \(known: calp, lbp, cslbp, csltp\)\.$"
        self.assertRaisesRegex(ParameterError, error, DescriptorConfig, "ldgp")

    def testBadRadius(self):
        """
        A CALP radius of 0 must cause a ParameterError.
        """
        self.assertRaises(ParameterError, DescriptorConfig, "calp", 0)

    def testRadiusIgnoredByBaselines(self):
        """
        A baseline must accept any radius, since it does not use one.
        """
        self.assertEqual(256, DescriptorConfig("lbp", 0).featureLength())

    def testNegativeThreshold(self):
        """
        A negative CSLBP threshold must cause a ParameterError.
        """
        self.assertRaises(ParameterError, DescriptorConfig, "cslbp", 3, -0.5)

    def testEffectiveThreshold(self):
        """
        Only CSLBP and CSLTP must have an effective threshold.
        """
        self.assertIsNone(DescriptorConfig("calp", 3, 2.0).effectiveThreshold)
        self.assertIsNone(DescriptorConfig("lbp").effectiveThreshold)
        self.assertEqual(0.0, DescriptorConfig("cslbp").effectiveThreshold)
        self.assertEqual(1.0, DescriptorConfig("csltp").effectiveThreshold)
        self.assertEqual(2.5, DescriptorConfig("csltp", 3, 2.5).effectiveThreshold)

    def testExtractCalp(self):
        """
        Extracting CALP features must give the cascaded CALP feature.
        """
        (image,) = randomImages(1)
        self.assertTrue(
            np.array_equal(
                calpFeature(image, CalpConfig(2)).bins,
                DescriptorConfig("calp", 2).extract(image).bins,
            )
        )

    def testStr(self):
        """
        The string form must show the radius of CALP and the threshold of
        thresholded baselines.
        """
        self.assertEqual("CALP (R=3)", str(DescriptorConfig()))
        self.assertEqual("LBP", str(DescriptorConfig("lbp")))
        self.assertEqual("CSLTP (T=1)", str(DescriptorConfig("csltp")))


class TestExtractAll(TestCase):
    """
    Tests for the extractAll function.
    """

    def testShapeAndOrder(self):
        """
        Rows must be the features of the images, in order.
        """
        images = randomImages(5)
        config = DescriptorConfig("calp", 2)
        vectors = extractAll(images, config)
        self.assertEqual((5, 128), vectors.shape)
        for image, row in zip(images, vectors):
            self.assertTrue(np.array_equal(config.extract(image).bins, row))

    def testWorkersDoNotMatter(self):
        """
        The result must not depend on the number of threads.
        """
        images = randomImages(12)
        config = DescriptorConfig("cslbp")
        self.assertTrue(
            np.array_equal(extractAll(images, config), extractAll(images, config, 4))
        )

    def testNoImages(self):
        """
        No images must give an empty matrix with the right number of columns.
        """
        self.assertEqual((0, 9), extractAll([], DescriptorConfig("csltp")).shape)

    def testTooSmall(self):
        """
        An image too small for the radius must cause a DimensionError.
        """
        images = randomImages(2, size=5)
        self.assertRaises(DimensionError, extractAll, images, DescriptorConfig())


class TestDescriptorTable(TestCase):
    """
    Tests for the descriptorTable function.
    """

    def testTable(self):
        """
        The table must list bit counts and feature lengths of every
        descriptor.
        """
        self.assertEqual(
            [
                ("LBP", 8, 256),
                ("CSLBP", 4, 16),
                ("CSLTP", None, 9),
                ("CALP (R=1)", 6, 64),
                ("CALP (R=2)", 12, 128),
                ("CALP (R=3)", 18, 192),
            ],
            descriptorTable(3),
        )

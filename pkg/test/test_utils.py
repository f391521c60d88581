from unittest import TestCase

import numpy as np

from calp.utils import formatFloat, parseFloatList, roundHalfUp


class TestRoundHalfUp(TestCase):
    """
    Tests for the roundHalfUp function.
    """

    def testHalfGoesUp(self):
        """
        A half must be rounded up, not to the nearest even integer.
        """
        self.assertEqual(3, roundHalfUp(2.5))

    def testOneHalf(self):
        """
        0.5 must round to 1.
        """
        self.assertEqual(1, roundHalfUp(0.5))

    def testBelowHalf(self):
        """
        A value just below a half must be rounded down.
        """
        self.assertEqual(0, roundHalfUp(0.4))

    def testInteger(self):
        """
        An integral value must be returned unchanged.
        """
        self.assertEqual(7, roundHalfUp(7.0))


class TestFormatFloat(TestCase):
    """
    Tests for the formatFloat function.
    """

    def testReadsBack(self):
        """
        The formatted value must read back as exactly the same float.
        """
        value = 1 / 3
        self.assertEqual(value, float(formatFloat(value)))

    def testNumpyScalar(self):
        """
        A numpy scalar must be formatted as a plain number.
        """
        self.assertEqual("0.25", formatFloat(np.float64(0.25)))

    def testZero(self):
        """
        Zero must be formatted as 0.0.
        """
        self.assertEqual("0.0", formatFloat(0))


class TestParseFloatList(TestCase):
    """
    Tests for the parseFloatList function.
    """

    def testCommaSeparated(self):
        """
        A comma-separated string must be parsed in order.
        """
        self.assertEqual([0.2, 0.3, 0.4], parseFloatList("0.2,0.3,0.4"))

    def testSpaces(self):
        """
        Spaces around values must be ignored.
        """
        self.assertEqual([0.2, 0.5], parseFloatList(" 0.2 , 0.5 "))

    def testList(self):
        """
        A list of numbers (as found in a JSON file) must be accepted.
        """
        self.assertEqual([0.5, 1.0], parseFloatList([0.5, 1]))

    def testBadValue(self):
        """
        A non-numeric value must cause a ValueError.
        """
        self.assertRaises(ValueError, parseFloatList, "0.2,x")

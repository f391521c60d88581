import builtins
from unittest import TestCase
from unittest.mock import mock_open, patch

from calp.config import (
    DEFAULT_FRACTIONS,
    BenchmarkConfig,
    convert,
    loadConfigFile,
    makeConfig,
)
from calp.descriptors import DescriptorConfig
from calp.error import ConfigError, ParameterError


class TestBenchmarkConfig(TestCase):
    """
    Tests for the BenchmarkConfig class.
    """

    def testDefaults(self):
        """
        The defaults must be CALP with R = 3, lambda 1 to 10, the five probe
        fractions, 10 folds and seed 0.
        """
        config = BenchmarkConfig()
        self.assertEqual(DescriptorConfig("calp", 3), config.descriptorConfig())
        self.assertEqual(range(1, 11), config.lambdas())
        self.assertEqual((0.2, 0.3, 0.4, 0.5, 0.6), DEFAULT_FRACTIONS)
        self.assertEqual(DEFAULT_FRACTIONS, config.fractions)
        self.assertEqual(10, config.folds)
        self.assertEqual(0, config.seed)
        self.assertEqual(10, config.maxRank)

    def testMergedKeyForms(self):
        """
        Keys may be camelCase, hyphenated or underscored.
        """
        config = BenchmarkConfig().merged(
            {"lambda-max": 5, "max_rank": 3, "lambdaMin": 2}
        )
        self.assertEqual(range(2, 6), config.lambdas())
        self.assertEqual(3, config.maxRank)

    def testMergedIgnoresNone(self):
        """
        None values must leave the current value alone.
        """
        self.assertEqual(7, BenchmarkConfig(folds=7).merged({"folds": None}).folds)

    def testMergedUnknownKey(self):
        """
        An unknown key must cause a ConfigError.
        """
        error = r"^Unknown configuration key 'colour' \(known keys: "
        self.assertRaisesRegex(
            ConfigError, error, BenchmarkConfig().merged, {"colour": "red"}
        )

    def testCheckLambdaRange(self):
        """
        A minimum lambda above the maximum must cause a ParameterError.
        """
        config = BenchmarkConfig(lambdaMin=5, lambdaMax=4)
        self.assertRaisesRegex(ParameterError, "5-4 is invalid", config.check)

    def testCheckFraction(self):
        """
        A probe fraction of 0 must cause a ParameterError.
        """
        config = BenchmarkConfig(fractions=(0.0,))
        self.assertRaisesRegex(
            ParameterError, r"Probe fraction 0\.0 is not strictly", config.check
        )

    def testCheckNoFractions(self):
        """
        An empty list of probe fractions must cause a ParameterError.
        """
        self.assertRaises(ParameterError, BenchmarkConfig(fractions=()).check)

    def testCheckFolds(self):
        """
        Zero folds must cause a ParameterError.
        """
        self.assertRaises(ParameterError, BenchmarkConfig(folds=0).check)

    def testCheckSeed(self):
        """
        A negative seed must cause a ParameterError.
        """
        self.assertRaises(ParameterError, BenchmarkConfig(seed=-1).check)

    def testCheckDescriptor(self):
        """
        An unknown descriptor must cause a ParameterError.
        """
        self.assertRaises(ParameterError, BenchmarkConfig(descriptor="sift").check)

    def testCheckWorkers(self):
        """
        Zero workers must cause a ParameterError.
        """
        self.assertRaises(ParameterError, BenchmarkConfig(workers=0).check)

    def testCheckLambdas(self):
        """
        A maximum lambda beyond the number of other images must cause a
        ParameterError.
        """
        config = BenchmarkConfig(lambdaMax=10)
        config.checkLambdas(11)
        error = (
            r"^Cannot retrieve up to 10 images from a dataset of 10 \(at most 9 "
            r"can be retrieved\)\.$"
        )
        self.assertRaisesRegex(ParameterError, error, config.checkLambdas, 10)


class TestConvert(TestCase):
    """
    Tests for the convert function.
    """

    def testFractions(self):
        """
        Fractions must be converted to a tuple of floats.
        """
        self.assertEqual((0.25, 0.5), convert("fractions", "0.25,0.5"))

    def testInteger(self):
        """
        An integral float must be accepted for an integer field.
        """
        self.assertEqual(4, convert("folds", 4.0))

    def testNonIntegral(self):
        """
        A non-integral float for an integer field must cause a
        ParameterError.
        """
        self.assertRaisesRegex(
            ParameterError,
            r"^Invalid value 2\.5 for configuration key 'folds'",
            convert,
            "folds",
            2.5,
        )

    def testBadThreshold(self):
        """
        A non-numeric threshold must cause a ParameterError.
        """
        self.assertRaises(ParameterError, convert, "threshold", "high")


class TestLoadConfigFile(TestCase):
    """
    Tests for the loadConfigFile and makeConfig functions.
    """

    def testJSON(self):
        """
        A JSON object must be loaded.
        """
        data = '{"descriptor": "cslbp", "threshold": 2, "fractions": [0.5]}'
        with patch.object(builtins, "open", mock_open(read_data=data)):
            self.assertEqual(
                {"descriptor": "cslbp", "threshold": 2, "fractions": [0.5]},
                loadConfigFile("file"),
            )

    def testTOML(self):
        """
        A TOML file must be loaded.
        """
        data = 'descriptor = "csltp"\nlambda-max = 5\nfractions = [0.3, 0.6]\n'
        with patch.object(builtins, "open", mock_open(read_data=data)):
            self.assertEqual(
                {"descriptor": "csltp", "lambda-max": 5, "fractions": [0.3, 0.6]},
                loadConfigFile("file"),
            )

    def testJSONNotAnObject(self):
        """
        A JSON list must cause a ConfigError.
        """
        with patch.object(builtins, "open", mock_open(read_data="[1, 2]")):
            error = r"^Configuration file 'file' must hold a JSON object\.$"
            self.assertRaisesRegex(ConfigError, error, loadConfigFile, "file")

    def testInvalid(self):
        """
        A file that is neither JSON nor TOML must cause a ConfigError naming
        the file.
        """
        with patch.object(builtins, "open", mock_open(read_data="descriptor =")):
            error = r"^Configuration file 'file' could not be parsed as JSON \("
            self.assertRaisesRegex(ConfigError, error, loadConfigFile, "file")

    def testMissing(self):
        """
        A missing file must cause a ConfigError.
        """
        self.assertRaisesRegex(
            ConfigError,
            "Could not read configuration file",
            loadConfigFile,
            "/no/such/config.toml",
        )

    def testPrecedence(self):
        """
        Overrides must take precedence over the file, and the file over the
        defaults.
        """
        data = '{"folds": 4, "seed": 9}'
        with patch.object(builtins, "open", mock_open(read_data=data)):
            config = makeConfig("file", {"seed": 12, "radius": None})
        self.assertEqual(4, config.folds)
        self.assertEqual(12, config.seed)
        self.assertEqual(3, config.radius)

    def testMakeConfigChecks(self):
        """
        makeConfig must check the resulting values.
        """
        self.assertRaises(ParameterError, makeConfig, None, {"radius": 0})

    def testNoFile(self):
        """
        Without a file or overrides, makeConfig must give the defaults.
        """
        self.assertEqual(BenchmarkConfig(), makeConfig())

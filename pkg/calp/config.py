import json
from dataclasses import dataclass, fields, replace
from json.decoder import JSONDecodeError
from pathlib import Path
from typing import Any, Optional, Union

import toml

from .dataset import MAX_SEED
from .descriptors import DescriptorConfig
from .error import ConfigError, ParameterError
from .utils import parseFloatList

DEFAULT_FRACTIONS = (0.2, 0.3, 0.4, 0.5, 0.6)


@dataclass(frozen=True)
class BenchmarkConfig:
    """
    Everything that determines a feature extraction or benchmark run.
    """

    descriptor: str = "calp"
    radius: int = 3
    threshold: Optional[float] = None
    lambdaMin: int = 1
    lambdaMax: int = 10
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    folds: int = 10
    seed: int = 0
    maxRank: int = 10
    workers: int = 1
    out: Optional[str] = None

    def descriptorConfig(self) -> DescriptorConfig:
        """
        Get the descriptor selection.

        @raise ParameterError: If the descriptor name, radius or threshold is
            invalid.
        @return: A C{DescriptorConfig}.
        """
        return DescriptorConfig(self.descriptor, self.radius, self.threshold)

    def lambdas(self) -> range:
        return range(self.lambdaMin, self.lambdaMax + 1)

    def check(self) -> None:
        """
        Check every parameter is in range.

        @raise ParameterError: If anything is out of range.
        """
        self.descriptorConfig()

        if not 1 <= self.lambdaMin <= self.lambdaMax:
            raise ParameterError(
                "The retrieval range %d-%d is invalid (need 1 <= minimum <= "
                "maximum)." % (self.lambdaMin, self.lambdaMax)
            )
        if not self.fractions:
            raise ParameterError("At least one probe fraction must be given.")
        for fraction in self.fractions:
            if not 0.0 < fraction < 1.0:
                raise ParameterError(
                    "Probe fraction %r is not strictly between 0 and 1." % fraction
                )
        if self.folds < 1:
            raise ParameterError(
                "The number of folds (%r) must be at least 1." % self.folds
            )
        if not 0 <= self.seed < MAX_SEED:
            raise ParameterError(
                "Seed %r is not a 64-bit unsigned integer." % self.seed
            )
        if self.maxRank < 1:
            raise ParameterError(
                "The maximum CMC rank (%r) must be at least 1." % self.maxRank
            )
        if self.workers < 1:
            raise ParameterError(
                "The number of workers (%r) must be at least 1." % self.workers
            )

    def checkLambdas(self, imageCount: int) -> None:
        """
        Check the retrieval range fits a dataset.

        @param imageCount: The C{int} number of images in the dataset.
        @raise ParameterError: If the largest number of retrieved images is
            more than C{imageCount - 1}.
        """
        if self.lambdaMax > imageCount - 1:
            raise ParameterError(
                "Cannot retrieve up to %d images from a dataset of %d (at most "
                "%d can be retrieved)." % (self.lambdaMax, imageCount, imageCount - 1)
            )

    def merged(self, values: dict[str, Any]) -> "BenchmarkConfig":
        """
        Get a copy with some values replaced.

        @param values: A C{dict} of new values. Keys may be camelCase field
            names or their hyphenated or underscored forms (e.g. 'lambda-max'
            or 'lambda_max' for 'lambdaMax'). C{None} values are ignored.
        @raise ConfigError: If a key is unknown.
        @raise ParameterError: If a value has the wrong type.
        @return: A new C{BenchmarkConfig}.
        """
        known = {normalizeKey(f.name): f.name for f in fields(self)}
        changes: dict[str, Any] = {}
        for key, value in values.items():
            if value is None:
                continue
            try:
                name = known[normalizeKey(key)]
            except KeyError:
                raise ConfigError(
                    "Unknown configuration key %r (known keys: %s)."
                    % (key, ", ".join(sorted(known.values())))
                )
            changes[name] = convert(name, value)
        return replace(self, **changes)


def normalizeKey(key: str) -> str:
    return key.replace("-", "").replace("_", "").lower()


def convert(name: str, value: Any) -> Any:
    """
    Convert a configuration value to the type its field needs.

    @param name: The C{str} field name.
    @param value: The value, as found on the command line or in a JSON or
        TOML file.
    @raise ParameterError: If the value cannot be converted.
    @return: The converted value.
    """
    try:
        if name == "fractions":
            return tuple(parseFloatList(value))
        elif name == "threshold":
            return float(value)
        elif name in ("descriptor", "out"):
            return str(value)
        else:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError("%r is not an integer" % value)
            return int(value)
    except (TypeError, ValueError) as e:
        raise ParameterError(
            "Invalid value %r for configuration key %r (%s)." % (value, name, e)
        )


def loadConfigFile(filename: Union[str, Path]) -> dict[str, Any]:
    """
    Load a JSON or TOML configuration file.

    @param filename: The C{str} or C{Path} name of the file.
    @raise ConfigError: If the file cannot be read, cannot be parsed as JSON
        or TOML, or does not hold a key/value mapping.
    @return: The parsed configuration as a C{dict}.
    """
    try:
        with open(filename) as fp:
            try:
                result = json.load(fp)
            except JSONDecodeError as e:
                jsonError = e
            else:
                if not isinstance(result, dict):
                    raise ConfigError(
                        "Configuration file %r must hold a JSON object."
                        % str(filename)
                    )
                return result

        with open(filename) as fp:
            try:
                return toml.load(fp)
            except toml.decoder.TomlDecodeError as tomlError:
                raise ConfigError(
                    f"Configuration file {str(filename)!r} could not be "
                    f"parsed as JSON ({jsonError}) or TOML ({tomlError})."
                )
    except OSError as e:
        raise ConfigError(
            "Could not read configuration file %r (%s)." % (str(filename), e)
        )


def makeConfig(
    configFile: Optional[Union[str, Path]] = None,
    overrides: Optional[dict[str, Any]] = None,
) -> BenchmarkConfig:
    """
    Build a configuration from defaults, an optional file, and overrides
    (typically command-line options), later sources taking precedence.

    @param configFile: The C{str} or C{Path} of a JSON or TOML configuration
        file, or C{None}.
    @param overrides: A C{dict} of values that override the file, or C{None}.
        C{None} values are ignored.
    @raise ConfigError: If the file cannot be loaded or has unknown keys.
    @raise ParameterError: If a value is invalid.
    @return: A checked C{BenchmarkConfig}.
    """
    config = BenchmarkConfig()
    if configFile is not None:
        config = config.merged(loadConfigFile(configFile))
    if overrides:
        config = config.merged(overrides)
    config.check()
    return config


class CalpError(Exception):
    "Base class of all calp exceptions."


class ImageReadError(CalpError, OSError):
    "An image file could not be read or written."


class ImageFormatError(CalpError):
    "An image file has a pixel format that is not supported."


class DatasetError(CalpError):
    "A problem was found in an image corpus."


class ParameterError(CalpError, ValueError):
    "A parameter value is outside its permitted range."


class DimensionError(CalpError, ValueError):
    "An image or vector does not have the dimensions an operation needs."


class BoundsError(CalpError, IndexError):
    "Pixel coordinates fall outside the region that can be encoded."


class EmptyRegionError(CalpError, ValueError):
    "A code image has no pixels to build a histogram from."


class EvaluationError(CalpError):
    "A retrieval or recognition measure cannot be computed."


class FeatureStoreError(CalpError):
    "A feature store file is malformed or inconsistent."


class ConfigError(CalpError):
    "A configuration file could not be parsed."

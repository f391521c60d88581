from math import floor
from typing import Iterable, Union


def roundHalfUp(value: float) -> int:
    """
    Round a number to the nearest integer, with halves rounded up.

    Python's C{round} rounds halves to the nearest even integer, which would
    make e.g. a probe fraction of 0.5 applied to a class of 5 images give 2
    rather than 3.

    @param value: A C{float} to round.
    @return: The C{int} nearest to C{value}, halves going up.
    """
    return int(floor(value + 0.5))


def formatFloat(value: float) -> str:
    """
    Convert a float to the shortest string that reads back as the same value.

    @param value: A C{float} (or numpy floating point scalar).
    @return: A C{str} such that C{float(result) == value}.
    """
    # float() first, so numpy scalars don't print as e.g. 'np.float64(0.5)'.
    return repr(float(value))


def parseFloatList(value: Union[str, Iterable[float]]) -> list[float]:
    """
    Parse a comma-separated list of floats.

    @param value: Either a C{str} such as "0.2,0.3,0.4" or an iterable of
        numbers (as found in a JSON or TOML configuration file).
    @raise ValueError: If a list element is not a number.
    @return: A C{list} of C{float}s, in the given order.
    """
    if isinstance(value, str):
        fields = [field.strip() for field in value.split(",")]
        return [float(field) for field in fields if field]
    else:
        return [float(field) for field in value]

#!/usr/bin/env python

from calp import __version__

print(__version__)

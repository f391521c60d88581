#!/usr/bin/env python

import sys

from calp.cli import main

sys.exit(main())

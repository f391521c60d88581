#!/usr/bin/env python

from setuptools import setup  # type: ignore
from pathlib import Path
import re


def version() -> str:
    """
    Get the version number from calp/__init__.py
    """
    init = Path("calp", "__init__.py")
    with open(init) as fp:
        initData = fp.read()
    match = re.search(r"^__version__ = ['\"]([^'\"]+)['\"]", initData, re.M)
    if match:
        return match.group(1)
    else:
        raise RuntimeError("Unable to find version string in %r." % init)


setup(
    name="calp-descriptor",
    version=version(),
    packages=["calp"],
    include_package_data=True,
    keywords=["texture", "local pattern", "image retrieval", "face recognition"],
    scripts=[
        "bin/calp.py",
        "bin/calp-version.py",
    ],
    classifiers=[
        "Programming Language :: Python :: 3",
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Image Recognition",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.22",
        "pandas>=1.5",
        "Pillow>=9.1",
        "pytest>=6.2.2",
        "toml",
    ],
    extras_require={
        "dev": [
            "flake8",
            "numpy",
            "pandas",
            "Pillow",
            "pycodestyle",
            "pytest",
            "toml",
            "types-toml",
        ],
        "test": [
            "numpy",
            "pandas",
            "Pillow",
            "pytest",
            "toml",
        ],
    },
    license="MIT",
    description=(
        "Cascaded asymmetric local pattern (CALP) texture descriptors, with "
        "LBP/CSLBP/CSLTP baselines and retrieval and recognition benchmarks."
    ),
)

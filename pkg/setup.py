#!/usr/bin/env python
from setuptools import setup

setup(
    name="pyHTSecrecy",
    packages=[
        "pyHTSecrecy",
        "pyHTSecrecy.probcore",
        "pyHTSecrecy.region",
        "pyHTSecrecy.scheme",
        "pyHTSecrecy.cli",
        "pyHTSecrecy.utility",
    ],
    version="0.1.0",
    description="Exponent regions and finite-blocklength simulation of distributed hypothesis "
    "testing against independence under equivocation constraints.",
    python_requires=">=3.9",
    install_requires=[
        "numpy",
        "scipy",
        "pandas>=1.5",
        "pyyaml",
        "tqdm",
    ],
    extras_require={"test": ["pytest"], "spinners": ["halo"]},
    classifiers=[
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Information Analysis",
    ],
    include_package_data=True,
    package_data={"pyHTSecrecy": ["bin/*.yaml"]},
    scripts=["scripts/ht-secrecy"],
)

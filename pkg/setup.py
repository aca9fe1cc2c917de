#!/usr/bin/env python
from setuptools import setup

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(name='fcqa',
      version='0.1.0',
      maintainer='The fcqa developers',
      description='Finite and unrestricted open-world query answering '
      'under unary inclusion and functional dependencies',
      long_description=long_description,
      long_description_content_type="text/markdown",
      packages=['fcqa', 'fcqa.builder'],
      install_requires=[
          'six',
          'networkx',
          'lark>=1.1',
      ],
      extras_require={
          'z3': ["z3-solver"],
          'test': ["pytest"],
      },
      entry_points={
          'console_scripts':
              ['fcqa=fcqa.fcqa:main'],
      },
      classifiers=[
          "Development Status :: 3 - Alpha",
          "Environment :: Console",
          "Intended Audience :: Science/Research",
          "License :: OSI Approved :: MIT License",
          "Programming Language :: Python :: 3",
          "Topic :: Database",
          "Topic :: Scientific/Engineering :: Mathematics",
      ],
      python_requires='>=3.8',
)  # noqa E124

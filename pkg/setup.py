#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Setup for uqkit.
"""

from os import path
from setuptools import setup

# read the contents of the README file
this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

# read version
with open(path.join(this_directory, 'uqkit', '_version.py'), encoding='utf-8') as f:
    version = f.read().split('=')[1].strip().strip('\'"')

requirements = ['matplotlib>=3.5',
                'numpy>=1.21',
                'pandas>=1.5',
                'scikit-learn>=1.0',
                'scipy>=1.7',
                'torch>=1.12']

setup(name='uqkit',
      version=version,
      description='Assess, visualize and recalibrate the uncertainty of regression predictions.',
      license='MIT',
      packages=['uqkit'],
      python_requires='>=3.9',
      install_requires=requirements,
      extras_require={'test': ['pytest>=7']},
      entry_points={'console_scripts': ['uqkit = uqkit.cli:main']},
      include_package_data=True,
      zip_safe=False,
      long_description=long_description,
      long_description_content_type='text/markdown',
      )

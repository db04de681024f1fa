#!/usr/bin/env python3

import os
from setuptools import setup, find_packages


BASE_DIR = os.path.abspath(os.path.dirname(__file__))
try:
    with open(os.path.join(BASE_DIR, 'README.rst')) as fp:
        README = fp.read()
except IOError:
    README = ''

setup(name='jobcover',
      version='0.1.0',
      description='Preemptive scheduling with general cost functions',
      long_description=README,
      classifiers=[
          'Development Status :: 3 - Alpha',
          'Environment :: Console',
          'Intended Audience :: Science/Research',
          'License :: OSI Approved :: MIT License',
          'Programming Language :: Python :: 3',
          'Programming Language :: Python :: 3.8',
          'Topic :: Scientific/Engineering :: Mathematics'
      ],
      keywords='scheduling linear-programming approximation max-flow',
      license='MIT',
      packages=find_packages(include=('jobcover*',)),
      install_requires=['numpy', 'scipy>=1.6', 'networkx'],
      extras_require={
          'dev': [
              'pytest',
              'pytest-mock',
              'pytest-asyncio',
              'coverage',
              'sphinx',
              'sphinx_rtd_theme',
              'twine',
              'wheel'
          ]
      },
      entry_points={
          'console_scripts': ['jobcover=jobcover.cli:main']
      },
      include_package_data=True,
      zip_safe=False)

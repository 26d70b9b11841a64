#!/usr/bin/env python
# -*- coding: utf-8 -*-

import ccnbandit

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup


with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = [
    'six',
    'persisting_theory',
    'numpy>=1.20',
    'scipy',
    'PyYAML',
]

test_requirements = [
    'pytest',
    'mock',
    'mpmath',
]

setup(
    name='ccnbandit',
    version=ccnbandit.__version__,
    description="Interest forwarding in content-centric networks as a bandit with delayed feedback",
    long_description=readme + '\n\n' + history,
    author=ccnbandit.__author__,
    author_email=ccnbandit.__email__,
    packages=[
        'ccnbandit',
    ],
    package_dir={'ccnbandit':
                 'ccnbandit'},
    package_data={'ccnbandit': ['presets/*.yaml']},
    include_package_data=True,
    install_requires=requirements,
    python_requires='>=3.7',
    entry_points={
        'console_scripts': [
            'ccnbandit = ccnbandit.cli:main',
        ],
    },
    license="BSD",
    zip_safe=False,
    keywords='ccn ndn forwarding multi-armed bandit delayed feedback',
    setup_requires=['pytest-runner'],
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering',
        'Topic :: System :: Networking',
    ],
    tests_require=test_requirements,
)

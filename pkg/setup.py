"""
Setup script for hankeldyn package
"""

# Always prefer setuptools over distutils
from setuptools import setup
# To use a consistent encoding
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the relevant file
with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

# Get the code version
version = {}
with open(path.join(here, "hankeldyn/version.py")) as fp:
    exec(fp.read(), version)
__version__ = version['__version__']
# now we have a `__version__` variable

setup(
    name='hankeldyn',
    version=__version__,
    description='Structured Hankel-operator networks and classical baselines '
                'for learning nonlinear dynamical systems',
    long_description=long_description,
    license='MIT',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
    keywords='hankel dynamical-systems neural-network dmd sindy',
    packages=['hankeldyn'],
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.4.0',
    ],
    entry_points={
        'console_scripts': [
            'hankeldyn=hankeldyn.cli:main',
        ],
    },
    extras_require={
        'benchmark': [
            'matplotlib>=3.1.2',
        ],
        'test': [
            'mock>=2.0.0',
            'coverage',
            'pytest>=6.0',
        ],
    },
)

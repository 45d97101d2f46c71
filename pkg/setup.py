"""
subfield-qed: dimensional reduction of cavity QED into 1D and 2D subfields
"""

from setuptools import setup
from os.path import relpath, join
import os

try:
    with open('README.md') as stream:
        long_description = stream.read()
except IOError:
    long_description = "Error reading README"

DOCLINES = __doc__.split("\n")

CLASSIFIERS = """\
Development Status :: 3 - Alpha
Intended Audience :: Science/Research
Intended Audience :: Developers
License :: OSI Approved :: MIT License
Programming Language :: Python
Programming Language :: Python :: 3
Topic :: Scientific/Engineering :: Physics
Operating System :: Unix
"""


def find_package_data(data_root, package_root):
    files = []
    for root, dirnames, filenames in os.walk(data_root):
        for fn in filenames:
            files.append(relpath(join(root, fn), package_root))
    return files


def read_version(path='subfield_qed/__init__.py'):
    with open(path) as stream:
        for line in stream:
            if line.startswith('__version__'):
                return line.split('=')[1].strip().strip("'\"")
    raise RuntimeError('no __version__ in {}'.format(path))


################################################################################
# SETUP
################################################################################

setup(
    name='subfield-qed',
    author="subfield-qed developers",
    description=DOCLINES[1],
    long_description=long_description,
    long_description_content_type='text/markdown',
    version=read_version(),
    license='MIT',
    python_requires=">=3.8",
    platforms=['Linux-64', 'Mac OSX-64', 'Unix-64'],
    classifiers=CLASSIFIERS.splitlines(),
    packages=['subfield_qed', 'subfield_qed.tests'],
    package_data={
        'subfield_qed': find_package_data('subfield_qed/tests/data', 'subfield_qed') + ['examples/*.json']
    },
    package_dir={'subfield_qed': 'subfield_qed'},
    install_requires=[
        'numpy',
        'scipy>=1.4',
        'pyyaml',
        'openmm',
        'matplotlib',
    ],
    entry_points={
        'console_scripts': ['subfield-qed=subfield_qed.cli:main'],
    },
    extras_require={
        'docs': [
            'sphinx',
            'sphinx_rtd_theme',
            'numpydoc',
        ],
        'tests': [
            'pytest',
            'pytest-cov',
            'hypothesis',
        ],
    },
    tests_require=[
        'pytest',
        'pytest-cov',
        'hypothesis',
    ],
    zip_safe=False,
    include_package_data=True)

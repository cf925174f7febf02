# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from glob import glob
from setuptools import setup, find_packages

NAME = "seeker"
VERSION = "1.0"  # not used here.

SCRIPTS = glob("bin/*")


setup(
    name=NAME,
    version=VERSION,
    packages=find_packages(exclude=("tests.*", "tests")),
    package_data={"seeker": ["*.yaml"]},
    scripts=SCRIPTS,
    test_suite="tests",
    tests_require=['pytest'],
    setup_requires=['setuptools_scm'],
    use_scm_version=True,

    license='Apache 2.0',
    description='Particle ensembles of question-asking policies priced by information gain.',
    long_description=open('README.md').read(),
    install_requires=[
        'blinker',
        'confuse',
        'docopt',
        'pyyaml',
        'numpy',
        'scipy',
    ],
    classifiers=[
        "Programming Language :: Python",
        "License :: Apache 2.0",
        "Programming Language :: Python :: 3 :: Only",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
)

########
# Copyright (c) 2018 Cloudify Platform Ltd. All rights reserved
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#        http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
#    * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#    * See the License for the specific language governing permissions and
#    * limitations under the License.


from setuptools import setup
from setuptools import find_packages


setup(
    name='jointct',
    version='1.1.0',
    author='jointct developers',
    license='LICENSE',
    zip_safe=False,
    packages=find_packages(exclude=['tests*', 'integration_testing*',
                                    'examples*']),
    package_data={'jointct_sdk': ['data/*.csv', 'data/*.yaml']},
    python_requires='>=3.8',
    install_requires=['numpy', 'scipy', 'PyYAML', 'matplotlib'],
    test_requires=['mock', 'pytest'],
    entry_points={
        'console_scripts': ['jointct=jointct_cli.main:main'],
    })

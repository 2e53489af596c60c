# #######
# Copyright (c) 2019 Cloudify Platform Ltd. All rights reserved
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#        http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Standard imports
import os
import shutil
import tempfile
import unittest

# Third party imports
import mock
import yaml

# Local imports
from jointct_sdk.resources.solvers import SolverResult
from jointct_cli.main import build_parser


class CommandTestBase(unittest.TestCase):

    def setUp(self):
        super(CommandTestBase, self).setUp()
        self.workdir = tempfile.mkdtemp()
        self.out_dir = os.path.join(self.workdir, 'out')
        self.logger = mock.MagicMock()

    def tearDown(self):
        shutil.rmtree(self.workdir, ignore_errors=True)
        super(CommandTestBase, self).tearDown()

    @property
    def run_config(self):
        return {
            'n1': 8,
            'n2': 8,
            'n_r': 40,
            'r_step': 0.2,
            'n_x0': 20,
            'x0_start': -4.0,
            'x0_step': 0.4,
            'n_theta': 16,
            'alpha': 0.1,
            'cgls_iters': 5,
            'cgls_restarts': 1,
            'smooth_iters': 5,
            'runs': 2,
            'n_directions': 90,
            'xray_offsets': [0.0, 1.0],
        }

    def write_config(self, overrides=None, name='run.yaml'):
        config = self.run_config
        config.update(overrides or {})
        path = os.path.join(self.workdir, name)
        with open(path, 'w') as handle:
            yaml.safe_dump(config, handle)
        return path

    def parse(self, *argv):
        return build_parser().parse_args(list(argv))

    def command_args(self, command, *extra, **overrides):
        return self.parse(command, '--config', self.write_config(overrides),
                          '--out', self.out_dir, *extra)

    def read_manifest(self, out_dir=None):
        path = os.path.join(out_dir or self.out_dir, 'manifest.yaml')
        with open(path) as handle:
            return yaml.safe_load(handle)

    def output_path(self, name, out_dir=None):
        return os.path.join(out_dir or self.out_dir, name)

    @staticmethod
    def perfect_solve(method, truth, *args, **kwargs):
        return SolverResult(truth, method, True, 1, 0.1, [(0, 1.0, 1.0)],
                            1.0), []

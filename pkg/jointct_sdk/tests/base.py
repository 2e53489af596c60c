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
import unittest

# Third party imports
import mock
import numpy as np

# Local imports
from jointct_sdk.resources.geometry import (Geometry,
                                            ImageGrid,
                                            LineSinogramGrid,
                                            ScannerConfig,
                                            ToricSinogramGrid)


class TomographyTestBase(unittest.TestCase):

    def setUp(self):
        super(TomographyTestBase, self).setUp()
        self.logger = mock.MagicMock()
        self.rng = np.random.default_rng(1234)

    def tearDown(self):
        super(TomographyTestBase, self).tearDown()

    @property
    def scanner(self):
        return ScannerConfig()

    @property
    def small_image(self):
        return ImageGrid.default(20)

    @property
    def small_toric(self):
        return ToricSinogramGrid.uniform(n_r=40, r_step=0.2, n_x0=20,
                                         x0_start=-4.0, x0_step=0.4)

    @property
    def small_line(self):
        return LineSinogramGrid.for_image(self.small_image, self.scanner,
                                          n_theta=24)

    @property
    def small_geometry(self):
        return Geometry(self.scanner, self.small_image, self.small_toric,
                        self.small_line)

    @property
    def tiny_geometry(self):
        image = ImageGrid.default(8)
        return Geometry(self.scanner, image, self.small_toric,
                        LineSinogramGrid.for_image(image, self.scanner,
                                                   n_theta=16))

    @property
    def geometry_config(self):
        return {
            'a': 4.0,
            'r_m': 7.0,
            'r_M': 9.0,
            'x1_min': -2.0,
            'x1_max': 2.0,
            'x2_min': -3.0,
            'x2_max': 1.0,
            'n1': 20,
            'n2': 20,
            'n_r': 40,
            'r_step': 0.2,
            'n_x0': 20,
            'x0_start': -4.0,
            'x0_step': 0.4,
            'n_theta': 24,
        }

    def assertAdjoint(self, op, pairs=50, tolerance=1e-12):
        for _ in range(pairs):
            x = self.rng.standard_normal(op.n_cols)
            y = self.rng.standard_normal(op.n_rows)
            forward = op.apply(x)
            gap = abs(forward.dot(y) - x.dot(op.apply_adjoint(y)))
            self.assertLessEqual(
                gap, tolerance * max(np.linalg.norm(forward) *
                                     np.linalg.norm(y), 1e-300))

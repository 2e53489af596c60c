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

# Third party imports
import numpy as np

# Local imports
from jointct_sdk.common import ConfigurationError
from jointct_sdk.resources import formats, operators
from jointct_sdk.tests import base


class FormatsTestCase(base.TomographyTestBase):

    def setUp(self):
        super(FormatsTestCase, self).setUp()
        self.workdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.workdir, ignore_errors=True)
        super(FormatsTestCase, self).tearDown()

    def test_grid_file(self):
        path = os.path.join(self.workdir, 'image.raw')
        values = self.rng.standard_normal((4, 6))
        extents = formats.image_extents(self.small_image)
        formats.write_grid(path, values, extents)
        with open(path, 'rb') as handle:
            header = handle.readline().decode('ascii').split()
        self.assertEqual(header[:2], ['6', '4'])
        loaded, loaded_extents = formats.read_grid(path)
        np.testing.assert_array_equal(loaded, values)
        self.assertEqual(loaded_extents, (-2.0, 2.0, -3.0, 1.0))

    def test_truncated_grid(self):
        path = os.path.join(self.workdir, 'broken.raw')
        with open(path, 'wb') as handle:
            handle.write(b'3 3 0 1 0 1\n')
            handle.write(np.zeros(4).astype('<f8').tobytes())
        with self.assertRaises(ConfigurationError):
            formats.read_grid(path)

    def test_grid_must_be_2d(self):
        with self.assertRaises(ConfigurationError):
            formats.write_grid(os.path.join(self.workdir, 'x.raw'),
                               np.zeros(3), (0, 1, 0, 1))

    def test_operator_triplets(self):
        op = operators.assemble_radon(self.small_image, self.small_line,
                                      True, self.scanner)
        path = os.path.join(self.workdir, 'op.txt')
        formats.write_triplets(path, op)
        loaded = formats.read_triplets(path)
        self.assertEqual(loaded.shape, op.shape)
        self.assertEqual(abs(loaded - op.matrix).max(), 0.0)
        self.assertEqual(operators.SparseLinearOperator(loaded).checksum(),
                         op.checksum())

    def test_point_list(self):
        path = os.path.join(self.workdir, 'points.txt')
        points = np.array([[5.656854249492381, -1.0], [0.5, 0.25]])
        formats.write_points(path, points)
        np.testing.assert_array_equal(formats.read_points(path), points)

    def test_sinogram_extents(self):
        np.testing.assert_allclose(formats.toric_extents(self.small_toric),
                                   (-3.6, 4.0, 1.2, 9.0))
        s_min, s_max, t_min, _ = formats.line_extents(self.small_line)
        self.assertAlmostEqual(s_min, -s_max)
        self.assertLess(t_min, 0.0)

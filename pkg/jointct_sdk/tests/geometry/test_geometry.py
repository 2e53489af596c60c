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
import math

# Third party imports
import numpy as np

# Local imports
from jointct_sdk.common import ConfigurationError, GeometryError
from jointct_sdk.resources import geometry
from jointct_sdk.tests import base


class ScannerConfigTestCase(base.TomographyTestBase):

    def test_default_scanner(self):
        cfg = self.scanner
        self.assertEqual(cfg.a, 4.0)
        self.assertEqual(cfg.r_m - 1, 6.0)
        self.assertEqual(cfg.r_M, 9.0)
        self.assertEqual(cfg.source_line, ((-4.0, 3.0), (4.0, 3.0)))
        self.assertEqual(cfg.detector_line, ((-4.0, -5.0), (4.0, -5.0)))
        self.assertEqual(cfg.center_line_height, 2.0)

    def test_invalid_scanner(self):
        with self.assertRaises(GeometryError):
            geometry.ScannerConfig(r_m=9.0, r_M=7.0)
        with self.assertRaises(GeometryError):
            geometry.ScannerConfig(a=0.0)
        with self.assertRaises(GeometryError):
            geometry.ScannerConfig(r_m=1.0)

    def test_from_mapping_rejects_bad_values(self):
        with self.assertRaises(ConfigurationError):
            geometry.ScannerConfig.from_mapping({'a': 'wide'})


class ImageGridTestCase(base.TomographyTestBase):

    def test_default_grid(self):
        img = geometry.ImageGrid.default()
        self.assertEqual(img.shape, (200, 200))
        self.assertAlmostEqual(img.dx1, 0.02)
        self.assertAlmostEqual(img.pixel_area, 4e-4)
        self.assertAlmostEqual(img.x1_centers[0], -1.99)
        self.assertAlmostEqual(img.x2_centers[-1], 0.99)

    def test_extended_grid(self):
        img = geometry.ImageGrid.extended()
        self.assertEqual((img.x1_min, img.x1_max), (-3.0, 3.0))
        self.assertEqual((img.x2_min, img.x2_max), (-4.0, 2.0))

    def test_pixel_index(self):
        img = self.small_image
        self.assertEqual(img.pixel_index((-1.99, -2.99)), (0, 0))
        self.assertEqual(img.pixel_index((0.05, -0.95)), (10, 10))
        self.assertIsNone(img.pixel_index((2.5, 0.0)))

    def test_to_pixel_coordinates(self):
        img = self.small_image
        col, row = img.to_pixel_coordinates(img.x1_centers[3],
                                            img.x2_centers[7])
        self.assertAlmostEqual(float(col), 3.0)
        self.assertAlmostEqual(float(row), 7.0)

    def test_empty_grid(self):
        with self.assertRaises(GeometryError):
            geometry.ImageGrid(n1=0)
        with self.assertRaises(GeometryError):
            geometry.ImageGrid(x1_min=1.0, x1_max=1.0)


class SinogramGridTestCase(base.TomographyTestBase):

    def test_default_toric_samples(self):
        sino = geometry.ToricSinogramGrid.uniform()
        self.assertEqual(sino.shape, (400, 200))
        self.assertAlmostEqual(sino.r_samples[0], 1.02)
        self.assertAlmostEqual(sino.r_samples[-1], 9.0)
        self.assertAlmostEqual(sino.x0_samples[0], -3.96)
        self.assertAlmostEqual(sino.x0_samples[-1], 4.0)
        sino.validate(self.scanner)

    def test_toric_radius_beyond_r_M(self):
        sino = geometry.ToricSinogramGrid.uniform()
        with self.assertRaises(GeometryError):
            sino.validate(geometry.ScannerConfig(r_M=8.0))

    def test_toric_samples_must_increase(self):
        with self.assertRaises(GeometryError):
            geometry.ToricSinogramGrid([2.0, 1.5], [0.0])

    def test_toric_row_labels(self):
        sino = self.small_toric
        labels = sino.row_labels()
        self.assertEqual(labels.shape, (sino.size, 2))
        np.testing.assert_allclose(labels[sino.n_x0 + 3],
                                   [sino.r_samples[1], sino.x0_samples[3]])

    def test_line_mask_matches_in_H(self):
        line = self.small_line
        self.assertEqual(line.mask.shape, (line.n_theta, line.n_s))
        for it in range(0, line.n_theta, 5):
            for i_s in range(0, line.n_s, 3):
                self.assertEqual(
                    line.mask[it, i_s],
                    geometry.in_H(line.s_samples[i_s],
                                  line.theta_samples[it], self.scanner))

    def test_line_sampling_covers_grid(self):
        line = self.small_line
        img = self.small_image
        self.assertGreaterEqual(line.s_samples[-1], img.circumradius)
        self.assertAlmostEqual(line.s_step, img.pixel_diagonal)
        self.assertAlmostEqual(line.theta_samples[0], -math.pi / 2)
        self.assertTrue(np.all(line.theta_samples < math.pi / 2))
        self.assertLess(line.active_rows().size, line.size)

    def test_line_angles_out_of_range(self):
        with self.assertRaises(GeometryError):
            geometry.LineSinogramGrid([0.0], [math.pi / 2])

    def test_geometry_from_mapping(self):
        geo = geometry.Geometry.from_mapping(self.geometry_config)
        self.assertEqual(geo.image.shape, (20, 20))
        self.assertEqual(geo.toric.shape, (40, 20))
        self.assertEqual(geo.line.n_theta, 24)


class LineTestCase(base.TomographyTestBase):

    def test_vertical_axis_line(self):
        point, direction = geometry.line_from_params(0.0, 0.0)
        np.testing.assert_allclose(point, [0.0, 0.0])
        np.testing.assert_allclose(direction, [0.0, 1.0])

    def test_near_horizontal_line(self):
        point, direction = geometry.line_from_params(3.0, 1.5707)
        self.assertAlmostEqual(point[1], 3.0, places=6)
        self.assertLess(abs(direction[1]), 1e-3)
        self.assertAlmostEqual(abs(direction[0]), 1.0, places=6)

    def test_diagonal_line(self):
        point, direction = geometry.line_from_params(1.0, math.pi / 4)
        half = math.sqrt(2) / 2
        np.testing.assert_allclose(point, [half, half])
        np.testing.assert_allclose(direction, [-half, half])

    def test_in_H_examples(self):
        cfg = self.scanner
        self.assertTrue(geometry.in_H(0.0, 0.0, cfg))
        self.assertFalse(geometry.in_H(0.0, math.pi / 2 - 1e-6, cfg))
        self.assertTrue(geometry.in_H(4.0, 0.0, cfg))
        self.assertFalse(geometry.in_H(4.01, 0.0, cfg))

    def test_in_H_mirror_symmetry(self):
        s = np.linspace(-6.0, 6.0, 121)
        theta = np.linspace(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3, 91)
        ss, tt = np.meshgrid(s, theta)
        np.testing.assert_array_equal(
            geometry.in_H(ss, tt, self.scanner),
            geometry.in_H(-ss, -tt, self.scanner))

    def test_in_H_monotone_in_offset(self):
        # The slice of H at fixed theta contains s = 0 for these angles.
        cfg = self.scanner
        s = np.linspace(0.0, 6.0, 241)
        for theta in np.linspace(-math.atan(0.8), math.atan(0.8), 31):
            for sign in (1.0, -1.0):
                inside = geometry.in_H(sign * s, np.full_like(s, theta), cfg)
                # Once a line leaves H it never re-enters further out.
                first_out = np.argmin(inside) if not inside.all() \
                    else s.size
                self.assertTrue(inside[:first_out].all())
                self.assertFalse(inside[first_out:].any())


class SegmentCircleTestCase(base.TomographyTestBase):

    def test_degenerate_tangent_circles(self):
        c1, c2, r = geometry.segment_circle_params(1e-12, 0.0)
        self.assertAlmostEqual(r, 1.0)
        np.testing.assert_allclose(c1, [0.0, 2.0], atol=1e-11)
        np.testing.assert_allclose(c2, [0.0, 2.0], atol=1e-11)

    def test_radius_three(self):
        c1, c2, r = geometry.segment_circle_params(math.sqrt(8), 0.0)
        self.assertAlmostEqual(r, 3.0)
        np.testing.assert_allclose(c1, [-math.sqrt(8), 2.0])
        np.testing.assert_allclose(c2, [math.sqrt(8), 2.0])

    def test_shifted_circles(self):
        c1, c2, r = geometry.segment_circle_params(1.0, 5.0)
        self.assertAlmostEqual(r, math.sqrt(2))
        np.testing.assert_allclose(c1, [4.0, 2.0])
        np.testing.assert_allclose(c2, [6.0, 2.0])

    def test_centers_symmetric(self):
        for s, x0 in self.rng.uniform(0.1, 5.0, size=(20, 2)):
            c1, c2, r = geometry.segment_circle_params(s, x0)
            self.assertAlmostEqual(0.5 * (c1[0] + c2[0]), x0)
            self.assertAlmostEqual(r, math.hypot(s, 1.0))

    def test_nonpositive_s(self):
        with self.assertRaises(GeometryError):
            geometry.segment_circle_params(0.0, 1.0)
        with self.assertRaises(GeometryError):
            geometry.segment_circle_params(-1.0, 1.0)

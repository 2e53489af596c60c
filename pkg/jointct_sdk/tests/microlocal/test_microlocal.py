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
from jointct_sdk.common import GeometryError, InvisibleDirectionError
from jointct_sdk.resources import microlocal
from jointct_sdk.resources.geometry import ImageGrid
from jointct_sdk.tests import base


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


class CircleFromCovectorTestCase(base.TomographyTestBase):

    def test_vertical_covector_at_origin_of_study(self):
        circle = microlocal.circle_from_covector(
            microlocal.Covector((0.0, -1.0), (0.0, 1.0)))
        self.assertAlmostEqual(circle.c, 0.0)
        self.assertAlmostEqual(circle.r, 3.0)
        self.assertAlmostEqual(circle.s, math.sqrt(8))
        self.assertAlmostEqual(circle.x0_1, math.sqrt(8))
        self.assertAlmostEqual(circle.x0_2, -math.sqrt(8))
        self.assertAlmostEqual(circle.sigma, -1.0 / 3.0)

    def test_vertical_covector_centers_above(self):
        for x1 in (-1.5, 0.3, 1.9):
            circle = microlocal.circle_from_covector(
                microlocal.Covector((x1, -2.0), (0.0, 2.5)))
            self.assertAlmostEqual(circle.c, x1)

    def test_oblique_covector(self):
        circle = microlocal.circle_from_covector(
            microlocal.Covector((1.0, -1.0), (1.0, 1.0)))
        self.assertAlmostEqual(circle.c, 4.0)
        self.assertAlmostEqual(circle.r, 3.0 * math.sqrt(2))
        self.assertAlmostEqual(circle.s, math.sqrt(17))

    def test_point_on_circle_and_normal(self):
        for _ in range(200):
            x = (self.rng.uniform(-2, 2), self.rng.uniform(-3, 0.9))
            alpha = self.rng.uniform(0.2, math.pi - 0.2)
            cv = microlocal.Covector(x, (math.cos(alpha), math.sin(alpha)))
            circle = microlocal.circle_from_covector(cv)
            offset = cv.x - circle.center
            self.assertAlmostEqual(np.linalg.norm(offset), circle.r,
                                   delta=1e-12 * circle.r)
            self.assertLessEqual(abs(cross(offset, cv.xi)),
                                 1e-12 * circle.r)

    def test_horizontal_covector_rejected(self):
        with self.assertRaises(InvisibleDirectionError):
            microlocal.circle_from_covector(
                microlocal.Covector((0.0, -1.0), (1.0, 0.0)))

    def test_outside_scan_region(self):
        with self.assertRaises(GeometryError):
            microlocal.circle_from_covector(
                microlocal.Covector((0.0, 1.5), (0.0, 1.0)))

    def test_zero_covector(self):
        with self.assertRaises(GeometryError):
            microlocal.Covector((0.0, 0.0), (0.0, 0.0))


class ConeTestCase(base.TomographyTestBase):

    def test_beta_max_at_study_point(self):
        value = microlocal.beta_max(-1.0, 9.0)
        self.assertAlmostEqual(value, math.atan(math.sqrt(8)))
        self.assertGreaterEqual(value, 1.230)
        self.assertLessEqual(value, 1.232)

    def test_beta_max_limits(self):
        self.assertLess(microlocal.beta_max(-7.0 + 1e-9, 9.0), 1e-3)
        self.assertAlmostEqual(microlocal.beta_max(1.0, 9.0),
                               math.atan(math.sqrt(80)))
        with self.assertRaises(GeometryError):
            microlocal.beta_max(-7.0, 9.0)

    def test_compton_cone_mirrors_beta_max(self):
        cfg = self.scanner
        for x2 in (-1.0, -7.0 + 1e-9, 1.0):
            self.assertEqual(microlocal.compton_visible_cone((0.3, x2), cfg),
                             microlocal.beta_max(x2, cfg.r_M))

    def test_radius_and_angle_tests_agree(self):
        cfg = self.scanner
        for _ in range(10000):
            x = (self.rng.uniform(-2, 2), self.rng.uniform(-3, 0.9))
            alpha = self.rng.uniform(0.0, math.pi)
            cv = microlocal.Covector(x, (math.cos(alpha), math.sin(alpha)))
            if not cv.in_D:
                continue
            by_radius = microlocal.circle_from_covector(cv).r <= cfg.r_M
            by_angle = microlocal.angle_from_vertical(cv.xi) < \
                microlocal.compton_visible_cone(x, cfg)
            self.assertEqual(by_radius, by_angle)

    def test_xray_cone_at_study_point(self):
        cone = microlocal.xray_visible_cone((0.0, -1.0), self.scanner)
        self.assertAlmostEqual(cone.low, -math.pi / 4)
        self.assertAlmostEqual(cone.high, math.pi / 4)
        self.assertTrue(cone.contains(0.0))
        self.assertTrue(cone.contains(math.pi))
        self.assertFalse(cone.contains(math.pi / 2))

    def test_xray_cone_rejects_source_line(self):
        with self.assertRaises(GeometryError):
            microlocal.xray_visible_cone((0.0, 3.0), self.scanner)

    def test_xray_cone_matches_line_sweep(self):
        cfg = self.scanner
        x = np.array([2.0, -1.0])
        cone = microlocal.xray_visible_cone(x, cfg)
        self.assertLess(cone.width, math.pi / 2)
        phi = (np.arange(10000) + 0.5) * math.pi / 10000
        hits_source = np.abs(x[0] + (3.0 - x[1]) / np.tan(phi)) <= cfg.a
        hits_detector = np.abs(x[0] + (-5.0 - x[1]) / np.tan(phi)) <= cfg.a
        measured = hits_source & hits_detector
        normals = phi + math.pi / 2
        distance = np.minimum(
            np.abs(np.mod(normals - cone.low + math.pi / 2, math.pi) -
                   math.pi / 2),
            np.abs(np.mod(normals - cone.high + math.pi / 2, math.pi) -
                   math.pi / 2))
        clear = distance > 1e-6
        np.testing.assert_array_equal(cone.contains(normals)[clear],
                                      measured[clear])


class VisibilityTestCase(base.TomographyTestBase):

    def _single_pixel(self, x1, x2):
        return ImageGrid(x1 - 0.005, x1 + 0.005, x2 - 0.005, x2 + 0.005, 1, 1)

    def test_full_coverage_at_study_point(self):
        coverage = microlocal.visibility_map(self._single_pixel(0.0, -1.0),
                                             self.scanner)
        self.assertEqual(coverage[0, 0], 1.0)

    def test_invisible_vertical_near_bottom(self):
        x = (0.0, -2.9)
        coverage = microlocal.visibility_map(self._single_pixel(*x),
                                             self.scanner)
        self.assertLess(coverage[0, 0], 1.0)
        self.assertFalse(microlocal.compton_direction_visible(
            x, np.array([math.pi / 2]), self.scanner)[0])
        self.assertFalse(microlocal.xray_visible_cone(
            x, self.scanner).contains(math.pi / 2))

    def test_coverage_shrinks_with_depth(self):
        column = ImageGrid(-0.01, 0.01, -3.0, -1.0, 1, 40)
        coverage = microlocal.visibility_map(column, self.scanner)[:, 0]
        self.assertTrue(np.all(np.diff(coverage) >= -1.0 / 720))
        self.assertLess(coverage[0], coverage[-1])

    def test_window_widens_compton_coverage(self):
        x = (0.0, -2.9)
        alpha = np.array([math.pi / 2])
        self.assertTrue(microlocal.compton_direction_visible(
            x, alpha, self.scanner, window=(-6.0, 6.0))[0])


class LambdaMapTestCase(base.TomographyTestBase):

    def _random_covectors(self, count):
        for _ in range(count):
            x = (self.rng.uniform(-2, 2), self.rng.uniform(-3, 0.9))
            alpha = self.rng.uniform(0.15, math.pi - 0.15)
            yield microlocal.Covector(x, (math.cos(alpha), math.sin(alpha)))

    def test_vertical_covector_at_study_point(self):
        artifact = microlocal.lambda12(
            microlocal.Covector((0.0, -1.0), (0.0, 1.0)))
        np.testing.assert_allclose(artifact.x, [2 * math.sqrt(8), -1.0],
                                   atol=1e-9)
        self.assertAlmostEqual(abs(artifact.unit_xi[1]), 1.0)
        self.assertGreater(artifact.x[0], 2.0)

    def test_artifact_lies_on_second_circle(self):
        for cv in self._random_covectors(500):
            circle = microlocal.circle_from_covector(cv)
            artifact = microlocal.lambda12(cv)
            if artifact is None:
                continue
            center = np.array([circle.x0_1 + circle.s, 2.0])
            offset = artifact.x - center
            self.assertAlmostEqual(np.linalg.norm(offset), circle.r,
                                   delta=1e-9 * circle.r)
            self.assertLessEqual(abs(cross(offset, artifact.xi)),
                                 1e-9 * circle.r)

    def test_second_map_lies_on_first_circle(self):
        for cv in self._random_covectors(500):
            circle = microlocal.circle_from_covector(cv)
            artifact = microlocal.lambda21(cv)
            if artifact is None:
                continue
            center = np.array([circle.x0_2 - circle.s, 2.0])
            self.assertAlmostEqual(np.linalg.norm(artifact.x - center),
                                   circle.r, delta=1e-9 * circle.r)

    def test_round_trip(self):
        checked = 0
        for cv in self._random_covectors(1000):
            forward = microlocal.lambda12(cv)
            if forward is None:
                continue
            back = microlocal.lambda21(forward)
            if back is None:
                continue
            checked += 1
            np.testing.assert_allclose(back.x, cv.x, atol=1e-8)
            self.assertLessEqual(abs(cross(back.unit_xi, cv.unit_xi)), 1e-8)
        self.assertGreater(checked, 100)

    def test_positive_scaling(self):
        for cv in self._random_covectors(100):
            artifact = microlocal.lambda12(cv)
            scaled = microlocal.lambda12(
                microlocal.Covector(cv.x, 7.5 * cv.xi))
            if artifact is None:
                self.assertIsNone(scaled)
                continue
            np.testing.assert_allclose(scaled.x, artifact.x, atol=1e-10)
            np.testing.assert_allclose(scaled.unit_xi, artifact.unit_xi,
                                       atol=1e-10)
            self.assertAlmostEqual(scaled.magnitude, 7.5 * artifact.magnitude)

    def test_invisible_covector_rejected(self):
        with self.assertRaises(InvisibleDirectionError):
            microlocal.lambda12(microlocal.Covector((0.0, -1.0), (1.0, 0.0)))
        with self.assertRaises(InvisibleDirectionError):
            microlocal.lambda21(microlocal.Covector((0.0, -1.0), (1.0, 0.0)))

    def test_artifact_curves(self):
        curves = microlocal.artifact_curves((0.0, -1.0), self.scanner)
        self.assertEqual(sorted(curves), ['lambda12', 'lambda21'])
        for points in curves.values():
            self.assertEqual(points.shape[1], 2)
            self.assertTrue(np.all(points[:, 1] < 1.0))
        distance = np.hypot(curves['lambda12'][:, 0] - 2 * math.sqrt(8),
                            curves['lambda12'][:, 1] + 1.0)
        self.assertLess(distance.min(), 0.05)


class SupportSetTestCase(base.TomographyTestBase):

    def test_rows_above_scan_region_are_empty(self):
        img = ImageGrid.extended(12)
        mask = microlocal.artifact_support_sets((0.0, 0.85), img,
                                                self.scanner, n_beta=400)
        self.assertFalse(mask[img.x2_centers >= 1.0].any())
        self.assertTrue(mask.any())

    def test_planted_root(self):
        img = self.small_image
        i2, i1 = 10, 8
        x1, x2 = img.x1_centers[i1], img.x2_centers[i2]
        beta = 0.3
        r = (2.0 - x2) / math.cos(beta)
        s = math.sqrt(r * r - 1.0)
        x0 = x1 + s + r * math.sin(beta)
        # y sits on the circle of radius r centered at (x0 + s, 2).
        y = (x0 + s + r * math.sin(-0.4), 2.0 - r * math.cos(-0.4))
        self.assertLess(y[1], 1.0)
        mask = microlocal.artifact_support_sets(y, img, self.scanner,
                                                n_beta=500)
        self.assertTrue(mask[i2, i1])

    def test_rejects_point_outside_scan_region(self):
        with self.assertRaises(GeometryError):
            microlocal.artifact_support_sets((0.0, 1.0), self.small_image,
                                             self.scanner)

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

# Third party imports
import numpy as np

# Local imports
from jointct_sdk.common import DimensionMismatchError, MetricError
from jointct_sdk.resources import metrics
from jointct_sdk.resources.geometry import ImageGrid
from jointct_sdk.resources.phantoms import PhantomPair, complex_phantom
from jointct_sdk.tests import base


def square(n=32, corner=(8, 8), size=12, value=1.0):
    image = np.zeros((n, n))
    image[corner[0]:corner[0] + size, corner[1]:corner[1] + size] = value
    return image


class RelErrorTestCase(base.TomographyTestBase):

    def test_identical(self):
        f = self.rng.uniform(size=(10, 10))
        self.assertEqual(metrics.rel_error(f, f), 0.0)

    def test_zero_reconstruction(self):
        f = self.rng.uniform(size=(10, 10))
        self.assertAlmostEqual(metrics.rel_error(f, np.zeros_like(f)), 1.0)

    def test_scaled(self):
        f = self.rng.uniform(size=(10, 10))
        self.assertAlmostEqual(metrics.rel_error(f, 1.1 * f), 0.1)

    def test_zero_truth(self):
        with self.assertRaises(MetricError):
            metrics.rel_error(np.zeros((4, 4)), np.ones((4, 4)))

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            metrics.rel_error(np.ones((4, 4)), np.ones((4, 5)))


class SupportScoreTestCase(base.TomographyTestBase):

    def test_identical(self):
        f = square()
        self.assertEqual(metrics.f_score_support(f, f), 1.0)

    def test_half_overlap(self):
        truth = np.zeros((4, 4))
        truth[0, :2] = 1.0
        recon = np.zeros((4, 4))
        recon[0, 1:3] = 1.0
        self.assertAlmostEqual(metrics.f_score_support(truth, recon), 0.5)

    def test_disjoint(self):
        truth = square(corner=(0, 0), size=8)
        recon = square(corner=(20, 20), size=8)
        self.assertEqual(metrics.f_score_support(truth, recon), 0.0)

    def test_zero_reconstruction(self):
        self.assertEqual(metrics.f_score_support(square(),
                                                 np.zeros((32, 32))), 0.0)

    def test_scale_invariant(self):
        f = square() + 0.5 * square(corner=(2, 2), size=4)
        self.assertEqual(metrics.f_score_support(f, 3.0 * f), 1.0)

    def test_symmetric(self):
        truth = square()
        recon = square(corner=(11, 9))
        self.assertAlmostEqual(metrics.f_score_support(truth, recon),
                               metrics.f_score_support(recon, truth))

    def test_threshold_excludes_faint_values(self):
        truth = square()
        recon = square() + 0.05
        self.assertEqual(metrics.f_score_support(truth, recon), 1.0)

    def test_empty_truth(self):
        with self.assertRaises(MetricError):
            metrics.f_score_support(np.zeros((4, 4)), square(4, (0, 0), 2))


class GradientScoreTestCase(base.TomographyTestBase):

    def test_identical(self):
        f = square()
        self.assertEqual(metrics.f_score_gradient(f, f), 1.0)

    def test_constant_offset(self):
        f = square()
        self.assertEqual(metrics.f_score_gradient(f, f + 3.0), 1.0)

    def test_one_pixel_shift_is_tolerated(self):
        self.assertEqual(
            metrics.f_score_gradient(square(), square(corner=(9, 8))), 1.0)

    def test_large_shift(self):
        score = metrics.f_score_gradient(square(), square(corner=(11, 8)))
        self.assertLess(score, 1.0)
        self.assertGreater(score, 0.0)

    def test_flat_reconstruction(self):
        self.assertEqual(
            metrics.f_score_gradient(square(), np.ones((32, 32))), 0.0)

    def test_flat_truth(self):
        with self.assertRaises(MetricError):
            metrics.f_score_gradient(np.ones((8, 8)), square(8, (2, 2), 3))

    def test_edge_map(self):
        edges = metrics.edge_map(square())
        self.assertTrue(edges[8, 7])
        self.assertTrue(edges[7, 8])
        self.assertFalse(edges[14, 14])
        self.assertFalse(edges[0, 0])


class ReportTestCase(base.TomographyTestBase):

    def _pair(self, n_e, mu_E):
        grid = ImageGrid.default(n_e.shape[0])
        labels = (n_e > 0).astype(np.int32)
        return PhantomPair(grid, n_e, mu_E, labels)

    def test_evaluate_perfect(self):
        truth = complex_phantom(ImageGrid.default(64))
        report = metrics.evaluate(truth, truth)
        self.assertEqual(report.eps_ne, 0.0)
        self.assertEqual(report.eps_mu, 0.0)
        self.assertEqual(report.f_supp_ne, 1.0)
        self.assertEqual(report.f_grad_mu, 1.0)

    def test_evaluate_separates_modalities(self):
        truth = self._pair(square(), 2.0 * square())
        recon = self._pair(square(), np.zeros((32, 32)))
        report = metrics.evaluate(truth, recon)
        self.assertEqual(report.eps_ne, 0.0)
        self.assertAlmostEqual(report.eps_mu, 1.0)
        self.assertEqual(report.f_supp_mu, 0.0)
        self.assertEqual(report.f_grad_ne, 1.0)

    def test_report_names(self):
        self.assertEqual(metrics.MetricReport.names(),
                         ['eps_ne', 'eps_mu', 'f_supp_ne', 'f_supp_mu',
                          'f_grad_ne', 'f_grad_mu'])

    def test_batch_stats(self):
        reports = [metrics.MetricReport(*([value] * 6))
                   for value in (0.1, 0.2, 0.3)]
        stats = metrics.batch_stats(reports)
        mean, std = stats['f_grad_mu']
        self.assertAlmostEqual(mean, 0.2)
        self.assertAlmostEqual(std, 0.1)

    def test_batch_stats_needs_two(self):
        with self.assertRaises(MetricError):
            metrics.batch_stats([metrics.MetricReport(*([0.0] * 6))])

    def test_format_table(self):
        report = metrics.MetricReport(0.1, 0.2, 0.9, 0.8, 0.7, 0.6)
        text = metrics.format_table({'tv': report,
                                     'jlam': {name: (0.5, 0.25) for name
                                              in report.names()}},
                                    precision=2)
        lines = text.splitlines()
        self.assertEqual(lines[0], 'metric,tv,jlam')
        self.assertEqual(lines[1], 'eps_ne,0.10,0.50 +/- 0.25')
        self.assertEqual(len(lines), 7)

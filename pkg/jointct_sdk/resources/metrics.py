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
import csv
import io
import math
from dataclasses import dataclass, fields

# Third party imports
import numpy as np
from scipy import ndimage

# Local imports
from jointct_sdk.common import DimensionMismatchError, MetricError

SUPPORT_THRESHOLD = 0.1
GRADIENT_THRESHOLD = 0.2
MATCH_TOLERANCE_PIXELS = 1


def _pair(truth, recon):
    truth = np.asarray(truth, dtype=float)
    recon = np.asarray(recon, dtype=float)
    if truth.shape != recon.shape:
        raise DimensionMismatchError(
            'Images differ in shape: {0} vs {1}'.format(truth.shape,
                                                        recon.shape))
    return truth, recon


def rel_error(truth, recon):
    """
    Relative l2 error ||recon - truth|| / ||truth||
    """
    truth, recon = _pair(truth, recon)
    norm = np.linalg.norm(truth)
    if norm == 0:
        raise MetricError('Relative error of a zero ground truth')
    return float(np.linalg.norm(recon - truth) / norm)


def _threshold(image, tau):
    peak = image.max()
    return image > tau * peak if peak > 0 else np.zeros(image.shape, bool)


def dice(a, b):
    total = a.sum() + b.sum()
    if total == 0:
        return 1.0
    return float(2.0 * np.logical_and(a, b).sum() / total)


def f_score_support(truth, recon, tau=SUPPORT_THRESHOLD):
    """
    Dice overlap of the supports {f > tau * max f}
    """
    truth, recon = _pair(truth, recon)
    if not truth.max() > 0:
        raise MetricError('Ground truth has an empty support')
    return dice(_threshold(truth, tau), _threshold(recon, tau))


def edge_map(image, tau=GRADIENT_THRESHOLD):
    g1 = np.zeros_like(image)
    g2 = np.zeros_like(image)
    g1[:, :-1] = np.diff(image, axis=1)
    g2[:-1, :] = np.diff(image, axis=0)
    return _threshold(np.hypot(g1, g2), tau)


def f_score_gradient(truth, recon, tau=GRADIENT_THRESHOLD,
                     tolerance=MATCH_TOLERANCE_PIXELS):
    """
    F-measure of the edge maps: an edge pixel counts as matched when the
    other map has an edge within the pixel tolerance
    """
    truth, recon = _pair(truth, recon)
    reference, found = edge_map(truth, tau), edge_map(recon, tau)
    if not reference.any():
        raise MetricError('Ground truth has no edges')
    if not found.any():
        return 0.0
    structure = ndimage.generate_binary_structure(2, 2)
    grown_reference = ndimage.binary_dilation(reference, structure,
                                              iterations=tolerance)
    grown_found = ndimage.binary_dilation(found, structure,
                                          iterations=tolerance)
    precision = np.logical_and(found, grown_reference).sum() / found.sum()
    recall = np.logical_and(reference, grown_found).sum() / reference.sum()
    if precision + recall == 0:
        return 0.0
    return float(2 * precision * recall / (precision + recall))


@dataclass(frozen=True)
class MetricReport:
    eps_ne: float
    eps_mu: float
    f_supp_ne: float
    f_supp_mu: float
    f_grad_ne: float
    f_grad_mu: float

    @classmethod
    def names(cls):
        return [f.name for f in fields(cls)]

    def as_dict(self):
        return dict((name, getattr(self, name)) for name in self.names())


def evaluate(truth, recon, tau=SUPPORT_THRESHOLD, tau_g=GRADIENT_THRESHOLD,
             tolerance=MATCH_TOLERANCE_PIXELS):
    """
    Score a reconstructed pair against the ground truth
    :param truth: PhantomPair
    :param recon: PhantomPair
    :return: MetricReport
    """
    return MetricReport(
        eps_ne=rel_error(truth.n_e, recon.n_e),
        eps_mu=rel_error(truth.mu_E, recon.mu_E),
        f_supp_ne=f_score_support(truth.n_e, recon.n_e, tau),
        f_supp_mu=f_score_support(truth.mu_E, recon.mu_E, tau),
        f_grad_ne=f_score_gradient(truth.n_e, recon.n_e, tau_g, tolerance),
        f_grad_mu=f_score_gradient(truth.mu_E, recon.mu_E, tau_g,
                                   tolerance))


def batch_stats(reports):
    """
    Per-metric mean and sample standard deviation over a batch
    :param reports: list of MetricReport
    :return: {metric: (mean, std)}
    """
    if len(reports) < 2:
        raise MetricError('Batch statistics need at least two reports, '
                          'got {0}'.format(len(reports)))
    stats = {}
    for name in MetricReport.names():
        values = np.array([getattr(report, name) for report in reports])
        stats[name] = (float(values.mean()), float(values.std(ddof=1)))
    return stats


def format_table(columns, precision=4):
    """
    Render metrics as CSV with one row per metric and one column per
    method
    :param columns: ordered mapping method -> MetricReport or
     {metric: (mean, std)}
    :return: CSV text
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(['metric'] + list(columns))
    for name in MetricReport.names():
        row = [name]
        for entry in columns.values():
            if isinstance(entry, MetricReport):
                row.append('{0:.{1}f}'.format(getattr(entry, name),
                                              precision))
            else:
                mean, std = entry[name]
                row.append('{0:.{2}f} +/- {1:.{2}f}'.format(
                    mean, 0.0 if math.isnan(std) else std, precision))
        writer.writerow(row)
    return out.getvalue()

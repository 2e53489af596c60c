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
import hashlib
import logging
import math

# Third party imports
import numpy as np
import scipy.sparse as sp
from scipy.integrate import trapezoid
from scipy.interpolate import RegularGridInterpolator

# Local imports
from jointct_sdk.common import (ConvergenceError,
                                ConfigurationError,
                                DimensionMismatchError,
                                GeometryError,
                                TomographyResource)
from jointct_sdk.resources.geometry import (CENTER_LINE_HEIGHT,
                                            SCAN_REGION_TOP,
                                            LineSinogramGrid,
                                            ToricSinogramGrid)
from jointct_sdk.resources.microlocal import beta_max

LOG = logging.getLogger(__name__)

TORIC_BRANCHES = (1, 2, 'both')
DEFAULT_ARC_REFINEMENT = 4
PARALLEL_TOLERANCE = 1e-12


class SparseLinearOperator(object):

    def __init__(self, matrix, row_labels=None, name=None):
        matrix = sp.csr_matrix(matrix, dtype=float)
        matrix.sum_duplicates()
        matrix.sort_indices()
        self.matrix = matrix
        self.row_labels = row_labels
        self.name = name

    def __str__(self):
        return '{0}[{1}x{2}, nnz={3}]'.format(
            self.name or 'operator', self.n_rows, self.n_cols, self.nnz)

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatchError(
                'Cannot add {0} and {1}'.format(self, other))
        return SparseLinearOperator(self.matrix + other.matrix,
                                    row_labels=self.row_labels,
                                    name=self.name)

    @property
    def n_rows(self):
        return self.matrix.shape[0]

    @property
    def n_cols(self):
        return self.matrix.shape[1]

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def nnz(self):
        return self.matrix.nnz

    def apply(self, x):
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.n_cols:
            raise DimensionMismatchError(
                '{0} expects {1} inputs, got {2}'.format(
                    self, self.n_cols, x.size))
        return self.matrix.dot(x)

    def apply_adjoint(self, y):
        y = np.asarray(y, dtype=float).ravel()
        if y.size != self.n_rows:
            raise DimensionMismatchError(
                'Adjoint of {0} expects {1} inputs, got {2}'.format(
                    self, self.n_rows, y.size))
        return self.matrix.T.dot(y)

    def checksum(self):
        digest = hashlib.sha256()
        digest.update(np.asarray(self.shape, dtype='<i8').tobytes())
        digest.update(self.matrix.indptr.astype('<i8').tobytes())
        digest.update(self.matrix.indices.astype('<i8').tobytes())
        digest.update(self.matrix.data.astype('<f8').tobytes())
        return digest.hexdigest()


def apply(op, x):
    return op.apply(x)


def apply_adjoint(op, y):
    return op.apply_adjoint(y)


def _arc_intervals(r, x2_bottom, x2_top):
    # Angles psi are measured from the downward vertical through the center,
    # so a point of the lower circle is (c + r sin psi, 2 - r cos psi).
    cos_top = (CENTER_LINE_HEIGHT - x2_top) / r
    if cos_top >= 1.0:
        return []
    psi_top = math.acos(cos_top)
    cos_bottom = (CENTER_LINE_HEIGHT - x2_bottom) / r
    if cos_bottom >= 1.0:
        return [(-psi_top, psi_top)]
    psi_bottom = math.acos(cos_bottom)
    return [(-psi_top, -psi_bottom), (psi_bottom, psi_top)]


def _toric_branch(img, sino, branch, arc_refinement):
    max_step = min(img.dx1, img.dx2) / arc_refinement
    x2_top = min(SCAN_REGION_TOP, img.x2_max)
    center_sign = -1.0 if branch == 1 else 1.0
    n_pixels = img.size
    rows, cols, weights = [], [], []

    for ir, r in enumerate(sino.r_samples):
        intervals = _arc_intervals(r, img.x2_min, x2_top)
        if not intervals:
            continue
        mids, lengths = [], []
        for low, high in intervals:
            n_steps = max(1, int(math.ceil((high - low) * r / max_step)))
            step = (high - low) / n_steps
            mids.append(low + (np.arange(n_steps) + 0.5) * step)
            lengths.append(np.full(n_steps, r * step))
        psi = np.concatenate(mids)
        arc = np.concatenate(lengths)

        i2 = np.floor((CENTER_LINE_HEIGHT - r * np.cos(psi) - img.x2_min) /
                      img.dx2).astype(np.int64)
        s = math.sqrt(r * r - 1.0)
        centers = sino.x0_samples + center_sign * s
        x1 = centers[:, None] + (r * np.sin(psi))[None, :]
        i1 = np.floor((x1 - img.x1_min) / img.dx1).astype(np.int64)
        inside = (i1 >= 0) & (i1 < img.n1) & \
            ((i2 >= 0) & (i2 < img.n2))[None, :]
        ix0, k = np.nonzero(inside)
        if not ix0.size:
            continue

        # Sub-arcs falling into the same pixel are summed per row here so
        # the per-radius triplet lists stay small.
        row = ir * sino.n_x0 + ix0
        col = i2[k] * img.n1 + i1[ix0, k]
        keys, inverse = np.unique(row * n_pixels + col, return_inverse=True)
        rows.append(keys // n_pixels)
        cols.append(keys % n_pixels)
        weights.append(np.bincount(inverse, weights=arc[k]))

    if not rows:
        return sp.csr_matrix((sino.size, n_pixels))
    return sp.csr_matrix(
        (np.concatenate(weights),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(sino.size, n_pixels))


def assemble_toric(img, sino, cfg, branch='both',
                   arc_refinement=DEFAULT_ARC_REFINEMENT, logger=None):
    """
    Assemble the discrete toric section transform
    :param img: ImageGrid of the unknown
    :param sino: ToricSinogramGrid, rows are ordered (r, x0) with x0 fastest
    :param cfg: ScannerConfig
    :param branch: 1, 2 or 'both'
    :param arc_refinement: number of arc steps per pixel side
    :param logger: optional logger
    :return: SparseLinearOperator holding arc lengths per pixel
    """
    logger = logger or LOG
    if branch not in TORIC_BRANCHES:
        raise ConfigurationError(
            'Unknown toric branch {0!r}, expected one of {1}'.format(
                branch, TORIC_BRANCHES))
    sino.validate(cfg)
    logger.debug(
        'Attempting to assemble toric operator with these args: '
        'branch={0} image={1} radii={2} offsets={3}'.format(
            branch, img, sino.n_r, sino.n_x0))
    if branch == 'both':
        matrix = _toric_branch(img, sino, 1, arc_refinement) + \
            _toric_branch(img, sino, 2, arc_refinement)
    else:
        matrix = _toric_branch(img, sino, branch, arc_refinement)
    op = SparseLinearOperator(matrix, row_labels=sino.row_labels(),
                              name='T{0}'.format(
                                  '' if branch == 'both' else branch))
    logger.debug('Assembled toric operator with this result: {0}'.format(op))
    return op


def _slab(offsets, direction, edges):
    # Parameter values where x(t) = offsets + t * direction crosses the
    # grid lines, plus the entry/exit interval of the slab they bound.
    if abs(direction) <= PARALLEL_TOLERANCE:
        inside = (offsets >= edges[0]) & (offsets <= edges[-1])
        crossings = np.empty((offsets.size, 0))
        low = np.where(inside, -np.inf, np.inf)
        return crossings, low, -low
    crossings = (edges[None, :] - offsets[:, None]) / direction
    return crossings, crossings.min(axis=1), crossings.max(axis=1)


def _radon_rows(img, line, it):
    theta = line.theta_samples[it]
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    s = line.s_samples
    x1_edges = img.x1_min + img.dx1 * np.arange(img.n1 + 1)
    x2_edges = img.x2_min + img.dx2 * np.arange(img.n2 + 1)

    # x(t) = s Theta + t (-sin, cos)
    t1, low1, high1 = _slab(s * cos_t, -sin_t, x1_edges)
    t2, low2, high2 = _slab(s * sin_t, cos_t, x2_edges)
    t_in = np.maximum(low1, low2)
    t_out = np.minimum(high1, high2)
    hit = t_out > t_in
    t_in = np.where(hit, t_in, 0.0)
    t_out = np.where(hit, t_out, 0.0)

    crossings = np.clip(np.concatenate([t1, t2], axis=1),
                        t_in[:, None], t_out[:, None])
    knots = np.sort(np.concatenate(
        [t_in[:, None], crossings, t_out[:, None]], axis=1), axis=1)
    chords = np.diff(knots, axis=1)
    mids = 0.5 * (knots[:, 1:] + knots[:, :-1])
    x1 = s[:, None] * cos_t - mids * sin_t
    x2 = s[:, None] * sin_t + mids * cos_t
    i1 = np.floor((x1 - img.x1_min) / img.dx1).astype(np.int64)
    i2 = np.floor((x2 - img.x2_min) / img.dx2).astype(np.int64)
    keep = hit[:, None] & (chords > PARALLEL_TOLERANCE) & \
        (i1 >= 0) & (i1 < img.n1) & (i2 >= 0) & (i2 < img.n2)
    i_s, k = np.nonzero(keep)
    return (it * line.n_s + i_s,
            i2[i_s, k] * img.n1 + i1[i_s, k],
            chords[i_s, k])


def assemble_radon(img, sino, limited, cfg, logger=None):
    """
    Assemble the discrete line Radon transform with exact chord lengths
    :param img: ImageGrid of the unknown
    :param sino: LineSinogramGrid, rows are ordered (theta, s) with s fastest
    :param limited: keep only the rows inside the data-set mask
    :param cfg: ScannerConfig the mask was built for
    :param logger: optional logger
    :return: SparseLinearOperator
    """
    logger = logger or LOG
    logger.debug(
        'Attempting to assemble {0} Radon operator with these args: '
        'image={1} offsets={2} angles={3} a={4}'.format(
            'limited' if limited else 'full', img, sino.n_s, sino.n_theta,
            cfg.a))
    rows, cols, chords = [], [], []
    for it in range(sino.n_theta):
        row, col, chord = _radon_rows(img, sino, it)
        rows.append(row)
        cols.append(col)
        chords.append(chord)
    matrix = sp.csr_matrix(
        (np.concatenate(chords), (np.concatenate(rows),
                                  np.concatenate(cols))),
        shape=(sino.size, img.size))
    if limited:
        matrix = matrix[sino.active_rows()]
    op = SparseLinearOperator(matrix,
                              row_labels=sino.row_labels(limited=limited),
                              name='R_L' if limited else 'R')
    logger.debug('Assembled Radon operator with this result: {0}'.format(op))
    return op


def central_difference_stencil(m):
    """
    Coefficients of the centered finite difference of order m on unit
    spacing, lowest offset first
    """
    if m < 1:
        raise GeometryError('Derivative order must be >= 1, got {0}'.format(
            m))
    stencil = np.array([1.0])
    if m % 2:
        stencil = np.array([-0.5, 0.0, 0.5])
    for _ in range(m // 2):
        stencil = np.convolve(stencil, [1.0, -2.0, 1.0])
    return stencil


def _banded_difference(n, spacing, m):
    stencil = central_difference_stencil(m) / spacing ** m
    half = stencil.size // 2
    offsets = [k for k in range(-half, half + 1) if abs(k) < n]
    diagonals = [stencil[k + half] for k in offsets]
    return sp.diags(diagonals, offsets, shape=(n, n), format='csr')


def derivative_filter(sino_grid, m=2):
    """
    Sinogram derivative of order m in the radial variable (s for line
    sinograms, r for toric ones), zero-extended at the boundary
    :param sino_grid: LineSinogramGrid or ToricSinogramGrid
    :param m: derivative order, at least 1
    :return: SparseLinearOperator acting on full sinograms
    """
    if isinstance(sino_grid, LineSinogramGrid):
        band = _banded_difference(sino_grid.n_s, sino_grid.s_step, m)
        matrix = sp.kron(sp.identity(sino_grid.n_theta), band)
    elif isinstance(sino_grid, ToricSinogramGrid):
        band = _banded_difference(sino_grid.n_r, sino_grid.r_step, m)
        matrix = sp.kron(band, sp.identity(sino_grid.n_x0))
    else:
        raise ConfigurationError(
            'Unsupported sinogram grid {0!r}'.format(sino_grid))
    return SparseLinearOperator(matrix, row_labels=sino_grid.row_labels(),
                                name='D{0}'.format(m))


def spectral_norm(op, max_iters=200, tol=1e-4, seed=0, strict=True,
                  logger=None):
    """
    Estimate the largest singular value by power iteration on A^T A
    :param op: SparseLinearOperator or any object with apply/apply_adjoint
    :param max_iters: iteration budget
    :param tol: relative change of the estimate that counts as converged
    :param seed: seed of the random start vector
    :param strict: raise ConvergenceError when the budget runs out
    :param logger: optional logger
    :return: the norm estimate
    """
    logger = logger or LOG
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.n_cols)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for iteration in range(1, max_iters + 1):
        z = op.apply_adjoint(op.apply(v))
        z_norm = np.linalg.norm(z)
        if z_norm == 0.0:
            raise ConvergenceError(
                'Power iteration hit the null space of {0}'.format(op),
                last_iterate=0.0)
        v = z / z_norm
        previous, sigma = sigma, math.sqrt(z_norm)
        if abs(sigma - previous) <= tol * sigma:
            logger.debug('Power iteration on {0} converged after {1} '
                         'iterations: {2}'.format(op, iteration, sigma))
            return sigma
    message = 'Power iteration on {0} did not reach tol={1} in {2} ' \
              'iterations'.format(op, tol, max_iters)
    if strict:
        raise ConvergenceError(message, last_iterate=sigma)
    logger.warning('{0}, using last estimate {1}'.format(message, sigma))
    return sigma


def backproject_toric_continuous(g, sino, branch, img, cfg, n_beta=2001):
    """
    Quadrature version of the toric backprojection, integrating the
    sinogram over the angle beta of the circles through each pixel
    :param g: toric sinogram values, shape (n_r, n_x0) or flat
    :param sino: ToricSinogramGrid g is sampled on
    :param branch: 1 or 2
    :param img: ImageGrid, every pixel center must satisfy x2 < 1
    :param cfg: ScannerConfig
    :param n_beta: trapezoid nodes per pixel
    :return: image array of shape img.shape
    """
    if branch not in (1, 2):
        raise ConfigurationError(
            'Continuous backprojection needs branch 1 or 2, got {0!r}'.format(
                branch))
    x2_centers = img.x2_centers
    if x2_centers.max() >= SCAN_REGION_TOP:
        raise GeometryError(
            'Pixels with x2 >= {0} lie outside the scan region'.format(
                SCAN_REGION_TOP))
    g = np.asarray(g, dtype=float).reshape(sino.shape)
    interpolate = RegularGridInterpolator(
        (sino.r_samples, sino.x0_samples), g, method='linear',
        bounds_error=False, fill_value=0.0)
    r_range = sino.r_samples[0], sino.r_samples[-1]
    offset_sign = 1.0 if branch == 1 else -1.0
    x1 = img.x1_centers

    result = np.zeros(img.shape)
    for i2, x2 in enumerate(x2_centers):
        half_width = beta_max(x2, cfg.r_M)
        beta = np.linspace(-half_width, half_width, n_beta)
        r = (CENTER_LINE_HEIGHT - x2) / np.cos(beta)
        s = np.sqrt(np.maximum(r * r - 1.0, 0.0))
        x0 = x1[:, None] + offset_sign * s[None, :] + \
            (r * np.sin(beta))[None, :]
        # Radii snap to the sampled range; circles whose x0 falls outside
        # the stored window were not measured and contribute zero.
        points = np.stack(
            [np.broadcast_to(np.clip(r, *r_range), x0.shape), x0], axis=-1)
        result[i2] = trapezoid(interpolate(points), beta, axis=1)
    return result


class ToricOperator(TomographyResource):
    resource_type = 'toric_operator'

    def create(self):
        error_message = self.validate_resource_config(('branch',))
        if error_message:
            raise ConfigurationError(error_message)
        return assemble_toric(
            self.geometry.image, self.geometry.toric, self.geometry.scanner,
            branch=self.config['branch'],
            arc_refinement=self.config.get('arc_refinement',
                                           DEFAULT_ARC_REFINEMENT),
            logger=self.logger)


class RadonOperator(TomographyResource):
    resource_type = 'radon_operator'

    def create(self):
        return assemble_radon(self.geometry.image, self.geometry.line,
                              bool(self.config.get('limited')),
                              self.geometry.scanner, logger=self.logger)


class DerivativeFilter(TomographyResource):
    resource_type = 'derivative_filter'

    def create(self):
        sinogram = self.config.get('sinogram', 'line')
        if sinogram not in ('line', 'toric'):
            raise ConfigurationError(
                'Unknown sinogram kind {0!r}'.format(sinogram))
        grid = self.geometry.line if sinogram == 'line' \
            else self.geometry.toric
        self.logger.debug(
            'Attempting to build order {0} filter on the {1} sinogram'.format(
                self.config.get('m', 2), sinogram))
        return derivative_filter(grid, int(self.config.get('m', 2)))

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

# Analytic artifact prediction: covector to circle maps, the two nonlocal
# artifact maps of the toric section transform, the artifact support sets of
# the cross backprojections and the visible direction cones of both
# modalities.

# Standard imports
import math
from dataclasses import dataclass

# Third party imports
import numpy as np
from scipy.optimize import minimize_scalar

# Local imports
from jointct_sdk.common import GeometryError, InvisibleDirectionError
from jointct_sdk.resources.geometry import (CENTER_LINE_HEIGHT,
                                            SCAN_REGION_TOP)

DENOMINATOR_TOLERANCE = 1e-12
TANGENCY_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Covector:
    x: np.ndarray
    xi: np.ndarray
    magnitude: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(2)
        xi = np.asarray(self.xi, dtype=float).reshape(2)
        if not np.any(xi):
            raise GeometryError('Covector direction must be nonzero')
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'xi', xi)

    @property
    def in_D(self):
        return self.xi[1] != 0.0

    @property
    def unit_xi(self):
        return self.xi / np.linalg.norm(self.xi)


@dataclass(frozen=True)
class CircleData:
    c: float
    r: float
    s: float
    x0_1: float
    x0_2: float
    sigma: float

    @property
    def center(self):
        return np.array([self.c, CENTER_LINE_HEIGHT])

    def x0(self, branch):
        return self.x0_1 if branch == 1 else self.x0_2


@dataclass(frozen=True)
class AngularInterval:
    """Normals +-(cos a, sin a) with low <= a <= high, high - low < pi."""
    low: float
    high: float

    @property
    def width(self):
        return self.high - self.low

    def contains(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        shifted = self.low + np.mod(alpha - self.low, math.pi)
        return shifted <= self.high


def circle_from_covector(cv):
    """
    Circle of the data set whose normal at cv.x is parallel to cv.xi
    :param cv: Covector with xi2 != 0 and x2 < 1
    :return: CircleData
    """
    x1, x2 = cv.x
    xi1, xi2 = cv.xi
    if xi2 == 0.0:
        raise InvisibleDirectionError(
            'Horizontal covector at {0} is normal to no circle'.format(cv.x))
    if x2 >= SCAN_REGION_TOP:
        raise GeometryError(
            'Point {0} lies outside the scan region'.format(cv.x))
    depth = CENTER_LINE_HEIGHT - x2
    c = x1 + xi1 * depth / xi2
    r = depth * math.hypot(xi1, xi2) / abs(xi2)
    if r <= 1.0:
        raise GeometryError('Degenerate circle of radius {0}'.format(r))
    s = math.sqrt(r * r - 1.0)
    return CircleData(c=c, r=r, s=s, x0_1=c + s, x0_2=c - s,
                      sigma=-xi2 / depth)


def beta_max(x2, r_M):
    """
    Half-width of the cone of directions seen by circles of radius <= r_M
    :param x2: ordinate of the point
    :param r_M: largest radius in the data set
    :return: angle in (0, pi/2)
    """
    depth = abs(CENTER_LINE_HEIGHT - x2)
    if depth >= r_M:
        raise GeometryError(
            'No circle of radius <= {0} reaches x2={1}'.format(r_M, x2))
    return math.atan(math.sqrt(r_M * r_M / (depth * depth) - 1.0))


def compton_visible_cone(x, cfg):
    return beta_max(x[1], cfg.r_M)


def angle_from_vertical(xi):
    xi = np.asarray(xi, dtype=float)
    return np.arccos(np.clip(
        np.abs(xi[..., 1]) / np.linalg.norm(xi, axis=-1), 0.0, 1.0))


def _window(cfg, window):
    return (-cfg.a, cfg.a) if window is None else window


def compton_direction_visible(x, alpha, cfg, window=None):
    """
    Decide which normal directions at x are seen by a measured circle
    :param x: point (x1, x2)
    :param alpha: array of normal angles, direction (cos alpha, sin alpha)
    :param cfg: ScannerConfig
    :param window: (low, high) range of measured offsets x0, defaults to
     the detector half-width [-a, a]
    :return: boolean array shaped like alpha
    """
    alpha = np.asarray(alpha, dtype=float)
    x1, x2 = x
    depth = CENTER_LINE_HEIGHT - x2
    if x2 >= SCAN_REGION_TOP:
        return np.zeros(alpha.shape, dtype=bool)
    low, high = _window(cfg, window)
    sin_a, cos_a = np.sin(alpha), np.cos(alpha)
    with np.errstate(divide='ignore', invalid='ignore'):
        r = depth / np.abs(sin_a)
        c = x1 + depth * cos_a / sin_a
        s = np.sqrt(np.maximum(r * r - 1.0, 0.0))
    in_window = ((c + s >= low) & (c + s <= high)) | \
        ((c - s >= low) & (c - s <= high))
    return (np.abs(sin_a) > 0) & (r <= cfg.r_M) & in_window


def _cot_range(x, cfg):
    x1, x2 = x
    above = cfg.source_height - x2
    below = x2 - cfg.detector_height
    if above <= 0 or below <= 0:
        raise GeometryError(
            'Point {0} is not strictly between the source and detector '
            'lines'.format(x))
    k_low = max((-cfg.a - x1) / above, (x1 - cfg.a) / below)
    k_high = min((cfg.a - x1) / above, (x1 + cfg.a) / below)
    return k_low, k_high


def xray_visible_cone(x, cfg):
    """
    Normals of the measured lines through x
    :param x: point strictly between the source and detector lines
    :param cfg: ScannerConfig
    :return: AngularInterval of normal angles, None when no line is measured
    """
    k_low, k_high = _cot_range(x, cfg)
    if k_low > k_high:
        return None
    # A line with direction (k, 1) has normal angle -atan(k).
    return AngularInterval(-math.atan(k_high), -math.atan(k_low))


def visibility_map(img, cfg, n_directions=720, window=None):
    """
    Fraction of the unit circle covered by the union of both visible cones
    :param img: ImageGrid
    :param cfg: ScannerConfig
    :param n_directions: uniform samples of the unit circle
    :param window: offset window passed to compton_direction_visible
    :return: array of shape img.shape with values in [0, 1]
    """
    alpha = (np.arange(n_directions) + 0.5) * 2 * math.pi / n_directions
    coverage = np.zeros(img.shape)
    for i2, x2 in enumerate(img.x2_centers):
        for i1, x1 in enumerate(img.x1_centers):
            cone = xray_visible_cone((x1, x2), cfg)
            seen = compton_direction_visible((x1, x2), alpha, cfg, window)
            if cone is not None:
                seen |= cone.contains(alpha)
            coverage[i2, i1] = np.count_nonzero(seen) / float(n_directions)
    return coverage


def lambda12(cv):
    """
    Artifact covector created by the first circle branch through cv.x
    :param cv: Covector in D
    :return: Covector with unit direction and stored magnitude, or None
    """
    x1, x2 = cv.x
    xi1, xi2 = cv.xi
    circle = circle_from_covector(cv)
    s, x0 = circle.s, circle.x0_1
    denominator = 2.0 * (x1 - x0) + s
    if abs(denominator) <= DENOMINATOR_TOLERANCE * max(1.0, s):
        return None
    y1 = s * (x1 - x0) / denominator + x0
    radicand = circle.r ** 2 - (y1 - (x0 + s)) ** 2
    if radicand < 0:
        return None
    y = np.array([y1, CENTER_LINE_HEIGHT - math.sqrt(radicand)])
    if y[1] >= SCAN_REGION_TOP:
        return None
    factor = -2.0 * xi1 - s * xi2 / (CENTER_LINE_HEIGHT - x2)
    return _unit_covector(y, factor * (y - [x0 + s, CENTER_LINE_HEIGHT]))


def lambda21(cv):
    """
    Artifact covector created by the second circle branch through cv.x
    :param cv: Covector in D
    :return: Covector with unit direction and stored magnitude, or None
    """
    y1, y2 = cv.x
    eta1, eta2 = cv.xi
    circle = circle_from_covector(cv)
    s, x0 = circle.s, circle.x0_2
    denominator = -2.0 * (y1 - x0) + s
    if abs(denominator) <= DENOMINATOR_TOLERANCE * max(1.0, s):
        return None
    x1 = s * (y1 - x0) / denominator + x0
    radicand = s * s + 1.0 - (x1 - (x0 - s)) ** 2
    if radicand < 0:
        return None
    x = np.array([x1, CENTER_LINE_HEIGHT - math.sqrt(radicand)])
    if x[1] >= SCAN_REGION_TOP:
        return None
    factor = 2.0 * eta1 - s * eta2 / (CENTER_LINE_HEIGHT - y2)
    return _unit_covector(x, factor * (x - [x0 - s, CENTER_LINE_HEIGHT]))


def _unit_covector(point, direction):
    magnitude = float(np.linalg.norm(direction))
    if magnitude == 0.0:
        return None
    return Covector(point, direction / magnitude, magnitude=magnitude)


def _support_residuals(y, x1, x2, beta, cross_sign):
    depth = CENTER_LINE_HEIGHT - x2
    r = depth / np.cos(beta)
    s = np.sqrt(r * r - 1.0)
    x0 = np.add.outer(x1, cross_sign * s + r * np.sin(beta))
    center = x0 + cross_sign * s
    return np.hypot(y[0] - center, y[1] - CENTER_LINE_HEIGHT) - r


def _touches(y, x1, x2, bracket, cross_sign):
    def residual(b):
        return abs(_support_residuals(y, np.array([x1]), x2,
                                      np.array([b]), cross_sign)[0, 0])
    found = minimize_scalar(residual, bounds=bracket, method='bounded',
                            options={'xatol': 1e-12})
    return found.fun <= TANGENCY_TOLERANCE


def artifact_support_sets(y, img, cfg, n_beta=2000):
    """
    Pixels that can receive mass from the cross backprojections of a point
    singularity at y
    :param y: point in the scan region
    :param img: ImageGrid
    :param cfg: ScannerConfig
    :param n_beta: angle samples per pixel
    :return: boolean array of shape img.shape (union of both sets)
    """
    y = np.asarray(y, dtype=float)
    if y[1] >= SCAN_REGION_TOP:
        raise GeometryError('Point {0} lies outside the scan region'.format(
            y))
    x1 = img.x1_centers
    mask = np.zeros(img.shape, dtype=bool)
    for i2, x2 in enumerate(img.x2_centers):
        if x2 >= SCAN_REGION_TOP or CENTER_LINE_HEIGHT - x2 >= cfg.r_M:
            continue
        half_width = beta_max(x2, cfg.r_M)
        beta = np.linspace(-half_width, half_width, n_beta)
        for cross_sign in (1.0, -1.0):
            residual = _support_residuals(y, x1, x2, beta, cross_sign)
            crossing = np.any(residual[:, :-1] * residual[:, 1:] <= 0,
                              axis=1)
            # A residual that only grazes zero between two samples is
            # settled by refining around the sampled minimum.
            magnitude = np.abs(residual)
            nearest = np.argmin(magnitude, axis=1)
            spread = np.max(np.abs(np.diff(residual, axis=1)), axis=1)
            grazing = ~crossing & \
                (magnitude[np.arange(x1.size), nearest] <= spread)
            for i1 in np.flatnonzero(grazing):
                k = nearest[i1]
                bracket = (beta[max(k - 1, 0)], beta[min(k + 1, n_beta - 1)])
                crossing[i1] = _touches(y, x1[i1], x2, bracket, cross_sign)
            mask[i2] |= crossing
    return mask


def artifact_curves(y, cfg, n_directions=720, window=None):
    """
    Predicted artifact locations generated by a point singularity at y,
    sweeping every direction the toric data set sees at y
    :param y: point in the scan region
    :param cfg: ScannerConfig
    :param n_directions: uniform samples of the half circle of directions
    :param window: measured offset window, defaults to [-a, a]
    :return: dict with 'lambda12' and 'lambda21' arrays of points
    """
    low, high = _window(cfg, window)
    curves = {'lambda12': [], 'lambda21': []}
    for k in range(n_directions):
        alpha = (k + 0.5) * math.pi / n_directions
        cv = Covector(y, (math.cos(alpha), math.sin(alpha)))
        if not cv.in_D:
            continue
        try:
            circle = circle_from_covector(cv)
        except GeometryError:
            continue
        if circle.r > cfg.r_M:
            continue
        for name, branch, artifact_map in (('lambda12', 1, lambda12),
                                           ('lambda21', 2, lambda21)):
            if not low <= circle.x0(branch) <= high:
                continue
            artifact = artifact_map(cv)
            if artifact is not None:
                curves[name].append(artifact.x)
    return dict((name, np.array(points).reshape(-1, 2))
                for name, points in curves.items())

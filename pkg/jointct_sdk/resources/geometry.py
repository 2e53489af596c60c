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

# Scanner geometry and discretization grids. Coordinates follow the scanner
# drawings: x2 grows upward, sources sit on x2 = 3 above the scan region and
# the transmission detectors on x2 = 2 - r_m below it. Circle centers of the
# toric sections live on the line x2 = 2.

# Standard imports
import math
from dataclasses import dataclass, field

# Third party imports
import numpy as np

# Local imports
from jointct_sdk.common import ConfigurationError, GeometryError

CENTER_LINE_HEIGHT = 2.0
SCAN_REGION_TOP = 1.0
INTERSECTION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ScannerConfig:
    a: float = 4.0
    r_m: float = 7.0
    r_M: float = 9.0
    source_height: float = 3.0

    def __post_init__(self):
        if not self.a > 0:
            raise GeometryError(
                'Array half-width must be positive, got {0}'.format(self.a))
        if not self.r_M > self.r_m > 1:
            raise GeometryError(
                'Scanner radii must satisfy r_M > r_m > 1, got '
                'r_m={0} r_M={1}'.format(self.r_m, self.r_M))

    @property
    def center_line_height(self):
        return CENTER_LINE_HEIGHT

    @property
    def detector_height(self):
        return CENTER_LINE_HEIGHT - self.r_m

    @property
    def source_line(self):
        return ((-self.a, self.source_height), (self.a, self.source_height))

    @property
    def detector_line(self):
        return ((-self.a, self.detector_height),
                (self.a, self.detector_height))

    @classmethod
    def from_mapping(cls, mapping):
        return cls(**_pick_floats(mapping, ('a', 'r_m', 'r_M',
                                            'source_height')))


@dataclass(frozen=True)
class ImageGrid:
    x1_min: float = -2.0
    x1_max: float = 2.0
    x2_min: float = -3.0
    x2_max: float = 1.0
    n1: int = 200
    n2: int = 200

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise GeometryError(
                'Pixel counts must be positive, got {0}x{1}'.format(
                    self.n1, self.n2))
        if not (self.x1_max > self.x1_min and self.x2_max > self.x2_min):
            raise GeometryError(
                'Empty image rectangle [{0},{1}]x[{2},{3}]'.format(
                    self.x1_min, self.x1_max, self.x2_min, self.x2_max))

    @classmethod
    def default(cls, n=200):
        return cls(-2.0, 2.0, -3.0, 1.0, n, n)

    @classmethod
    def extended(cls, n=300):
        return cls(-3.0, 3.0, -4.0, 2.0, n, n)

    @classmethod
    def from_mapping(cls, mapping):
        values = _pick_floats(mapping, ('x1_min', 'x1_max',
                                        'x2_min', 'x2_max'))
        values.update(_pick_ints(mapping, ('n1', 'n2')))
        return cls(**values)

    @property
    def dx1(self):
        return (self.x1_max - self.x1_min) / self.n1

    @property
    def dx2(self):
        return (self.x2_max - self.x2_min) / self.n2

    @property
    def pixel_area(self):
        return self.dx1 * self.dx2

    @property
    def pixel_diagonal(self):
        return math.hypot(self.dx1, self.dx2)

    @property
    def shape(self):
        # Images are stored row-major with rows running along x2.
        return self.n2, self.n1

    @property
    def size(self):
        return self.n1 * self.n2

    @property
    def area(self):
        return (self.x1_max - self.x1_min) * (self.x2_max - self.x2_min)

    @property
    def x1_centers(self):
        return self.x1_min + (np.arange(self.n1) + 0.5) * self.dx1

    @property
    def x2_centers(self):
        return self.x2_min + (np.arange(self.n2) + 0.5) * self.dx2

    @property
    def circumradius(self):
        corners = [(x1, x2) for x1 in (self.x1_min, self.x1_max)
                   for x2 in (self.x2_min, self.x2_max)]
        return max(math.hypot(x1, x2) for x1, x2 in corners)

    def meshgrid(self):
        return np.meshgrid(self.x1_centers, self.x2_centers)

    def pixel_index(self, point):
        """
        Locate the pixel containing a point
        :param point: (x1, x2) pair
        :return: (i2, i1) index pair or None when the point is outside
        """
        i1 = int(math.floor((point[0] - self.x1_min) / self.dx1))
        i2 = int(math.floor((point[1] - self.x2_min) / self.dx2))
        if 0 <= i1 < self.n1 and 0 <= i2 < self.n2:
            return i2, i1
        return None

    def to_pixel_coordinates(self, x1, x2):
        """
        Map physical coordinates to fractional column/row positions, used
        when overlaying point lists on rendered images
        """
        col = (np.asarray(x1) - self.x1_min) / self.dx1 - 0.5
        row = (np.asarray(x2) - self.x2_min) / self.dx2 - 0.5
        return col, row


@dataclass(frozen=True, eq=False)
class ToricSinogramGrid:
    r_samples: np.ndarray
    x0_samples: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r_samples, dtype=float)
        x0 = np.asarray(self.x0_samples, dtype=float)
        if r.ndim != 1 or x0.ndim != 1 or not r.size or not x0.size:
            raise GeometryError('Toric sample arrays must be non-empty 1-D')
        if np.any(np.diff(r) <= 0) or np.any(np.diff(x0) <= 0):
            raise GeometryError('Toric samples must be strictly increasing')
        object.__setattr__(self, 'r_samples', r)
        object.__setattr__(self, 'x0_samples', x0)

    @classmethod
    def uniform(cls, n_r=400, r_step=0.02, n_x0=200,
                x0_start=-4.0, x0_step=0.04):
        j_r = np.arange(1, n_r + 1)
        j_x0 = np.arange(1, n_x0 + 1)
        return cls(1.0 + r_step * j_r, x0_start + x0_step * j_x0)

    @classmethod
    def from_mapping(cls, mapping):
        values = _pick_ints(mapping, ('n_r', 'n_x0'))
        values.update(_pick_floats(mapping, ('r_step', 'x0_start',
                                             'x0_step')))
        return cls.uniform(**values)

    @property
    def n_r(self):
        return self.r_samples.size

    @property
    def n_x0(self):
        return self.x0_samples.size

    @property
    def shape(self):
        return self.n_r, self.n_x0

    @property
    def size(self):
        return self.n_r * self.n_x0

    @property
    def r_step(self):
        return float(np.mean(np.diff(self.r_samples))) \
            if self.n_r > 1 else 1.0

    @property
    def x0_step(self):
        return float(np.mean(np.diff(self.x0_samples))) \
            if self.n_x0 > 1 else 1.0

    @property
    def x0_window(self):
        return float(self.x0_samples[0]), float(self.x0_samples[-1])

    def row_labels(self):
        r, x0 = np.meshgrid(self.r_samples, self.x0_samples, indexing='ij')
        return np.column_stack([r.ravel(), x0.ravel()])

    def validate(self, cfg):
        if self.r_samples[0] <= 1.0:
            raise GeometryError(
                'Toric radii must exceed 1, got {0}'.format(
                    self.r_samples[0]))
        if self.r_samples[-1] > cfg.r_M * (1 + 1e-12):
            raise GeometryError(
                'Toric radius {0} exceeds r_M={1}'.format(
                    self.r_samples[-1], cfg.r_M))


@dataclass(frozen=True, eq=False)
class LineSinogramGrid:
    s_samples: np.ndarray
    theta_samples: np.ndarray
    # Indexed [theta, s]; sinogram rows are theta-major.
    mask: np.ndarray = field(default=None)

    def __post_init__(self):
        s = np.asarray(self.s_samples, dtype=float)
        theta = np.asarray(self.theta_samples, dtype=float)
        if np.any(theta < -math.pi / 2 - 1e-12) or \
                np.any(theta >= math.pi / 2):
            raise GeometryError('Line angles must lie in [-pi/2, pi/2)')
        mask = np.ones((theta.size, s.size), dtype=bool) \
            if self.mask is None else np.asarray(self.mask, dtype=bool)
        if mask.shape != (theta.size, s.size):
            raise GeometryError(
                'Mask shape {0} does not match {1}'.format(
                    mask.shape, (theta.size, s.size)))
        object.__setattr__(self, 's_samples', s)
        object.__setattr__(self, 'theta_samples', theta)
        object.__setattr__(self, 'mask', mask)

    @classmethod
    def for_image(cls, img, cfg, n_theta=180, s_step=None):
        """
        Build the line sampling covering an image grid
        :param img: ImageGrid the lines have to cover
        :param cfg: ScannerConfig used to evaluate the data-set mask
        :param n_theta: number of uniform angles in [-pi/2, pi/2)
        :param s_step: spacing in s, pixel diagonal when omitted
        :return: LineSinogramGrid with the H mask filled in
        """
        s_step = s_step or img.pixel_diagonal
        half = int(math.ceil(img.circumradius / s_step))
        s = s_step * np.arange(-half, half + 1)
        theta = -math.pi / 2 + math.pi * np.arange(n_theta) / n_theta
        ss, tt = np.meshgrid(s, theta)
        return cls(s, theta, in_H(ss, tt, cfg))

    @property
    def n_s(self):
        return self.s_samples.size

    @property
    def n_theta(self):
        return self.theta_samples.size

    @property
    def shape(self):
        return self.n_theta, self.n_s

    @property
    def size(self):
        return self.n_theta * self.n_s

    @property
    def s_step(self):
        return float(np.mean(np.diff(self.s_samples))) \
            if self.n_s > 1 else 1.0

    def active_rows(self):
        return np.flatnonzero(self.mask.ravel())

    def row_labels(self, limited=False):
        ss, tt = np.meshgrid(self.s_samples, self.theta_samples)
        labels = np.column_stack([ss.ravel(), tt.ravel()])
        return labels[self.active_rows()] if limited else labels


@dataclass(frozen=True, eq=False)
class Geometry:
    scanner: ScannerConfig
    image: ImageGrid
    toric: ToricSinogramGrid
    line: LineSinogramGrid

    @classmethod
    def from_mapping(cls, mapping):
        scanner = ScannerConfig.from_mapping(mapping)
        image = ImageGrid.from_mapping(mapping)
        toric = ToricSinogramGrid.from_mapping(mapping)
        toric.validate(scanner)
        line = LineSinogramGrid.for_image(
            image, scanner,
            n_theta=int(mapping.get('n_theta', 180)),
            s_step=mapping.get('s_step'))
        return cls(scanner, image, toric, line)


def line_from_params(s, theta):
    """
    Return a point and unit direction for the line {x . Theta = s}
    :param s: signed distance of the line from the origin
    :param theta: angle of the normal Theta = (cos theta, sin theta)
    :return: (point, direction) as numpy arrays
    """
    normal = np.array([math.cos(theta), math.sin(theta)])
    direction = np.array([-normal[1], normal[0]])
    return s * normal, direction


def _line_meets_segment(s, theta, start, end):
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    phi_start = start[0] * cos_t + start[1] * sin_t - s
    phi_end = end[0] * cos_t + end[1] * sin_t - s
    low = np.minimum(phi_start, phi_end)
    high = np.maximum(phi_start, phi_end)
    return (low <= INTERSECTION_TOLERANCE) & (high >= -INTERSECTION_TOLERANCE)


def in_H(s, theta, cfg):
    """
    Decide whether lines meet both the source and the detector segment
    :param s: scalar or array of line offsets
    :param theta: scalar or array of line angles, broadcastable with s
    :param cfg: ScannerConfig
    :return: bool or boolean array
    """
    inside = _line_meets_segment(s, theta, *cfg.source_line) & \
        _line_meets_segment(s, theta, *cfg.detector_line)
    if np.ndim(inside) == 0:
        return bool(inside)
    return inside


def segment_circle_params(s, x0):
    """
    Circle data of the toric section with parameters (s, x0)
    :param s: half distance between the two centers, must be positive
    :param x0: abscissa of the midpoint between the centers
    :return: (c1, c2, r) with centers as numpy arrays
    """
    if not s > 0:
        raise GeometryError('Toric parameter s must be positive, got '
                            '{0}'.format(s))
    r = math.sqrt(s * s + 1.0)
    c1 = np.array([x0 - s, CENTER_LINE_HEIGHT])
    c2 = np.array([x0 + s, CENTER_LINE_HEIGHT])
    return c1, c2, r


def _pick_floats(mapping, keys):
    return _pick(mapping, keys, float)


def _pick_ints(mapping, keys):
    return _pick(mapping, keys, int)


def _pick(mapping, keys, cast):
    values = {}
    for key in keys:
        if mapping.get(key) is None:
            continue
        try:
            values[key] = cast(mapping[key])
        except (TypeError, ValueError):
            raise ConfigurationError(
                'Invalid value for {0}: {1!r}'.format(key, mapping[key]))
    return values

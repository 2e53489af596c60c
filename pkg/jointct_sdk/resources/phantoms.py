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
import logging
import math
import os
from dataclasses import dataclass, field, replace

# Third party imports
import numpy as np
import yaml
from scipy import stats

# Local imports
from jointct_sdk.common import ConfigurationError, TomographyResource

LOG = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data')
DEFAULT_MATERIALS_FILE = os.path.join(DATA_DIR, 'materials.csv')
DEFAULT_PHANTOM_FILE = os.path.join(DATA_DIR, 'phantoms.yaml')
PHANTOM_FILE_VERSION = 1
PHANTOM_NAMES = ('simple', 'complex', 'bar')
MATERIAL_COLUMNS = ('name', 'n_e', 'mu_100keV')
NEAR_ORIGIN_FRACTION = 0.01


@dataclass(frozen=True)
class Material:
    name: str
    n_e: float
    mu_100keV: float
    extra: dict = field(default_factory=dict, compare=False)

    def value(self, column):
        if column == 'mu_100keV':
            return self.mu_100keV
        if column not in self.extra:
            raise ConfigurationError(
                'Material {0} has no column {1}'.format(self.name, column))
        return self.extra[column]


class MaterialTable(object):

    def __init__(self, materials, background='air'):
        self.materials = tuple(materials)
        self.background = background
        self._by_name = dict((m.name, m) for m in self.materials)
        if not self.materials:
            raise ConfigurationError('Material table is empty')

    def __len__(self):
        return len(self.materials)

    def __iter__(self):
        return iter(self.materials)

    def get(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise ConfigurationError('Unknown material {0!r}'.format(name))

    def candidates(self):
        return tuple(m for m in self.materials if m.name != self.background)


def load_materials(path=None, background='air'):
    """
    Read a material CSV with at least the columns name,n_e,mu_100keV
    :param path: CSV file, the shipped table when omitted
    :param background: name of the background material
    :return: MaterialTable
    """
    path = path or DEFAULT_MATERIALS_FILE
    materials = []
    try:
        with open(path) as handle:
            reader = csv.DictReader(handle)
            missing = set(MATERIAL_COLUMNS) - set(reader.fieldnames or ())
            if missing:
                raise ConfigurationError(
                    'Material file {0} lacks columns {1}'.format(
                        path, sorted(missing)))
            for row in reader:
                extra = dict((key, float(value)) for key, value in row.items()
                             if key not in MATERIAL_COLUMNS and value)
                material = Material(row['name'], float(row['n_e']),
                                    float(row['mu_100keV']), extra)
                if material.n_e < 0 or material.mu_100keV < 0:
                    raise ConfigurationError(
                        'Negative values for material {0}'.format(
                            material.name))
                materials.append(material)
    except (IOError, OSError) as error:
        raise ConfigurationError(
            'Cannot read material file {0}: {1}'.format(path, error))
    except ValueError as error:
        raise ConfigurationError(
            'Malformed material file {0}: {1}'.format(path, error))
    return MaterialTable(materials, background=background)


def load_phantom_description(path=None):
    path = path or DEFAULT_PHANTOM_FILE
    try:
        with open(path) as handle:
            description = yaml.safe_load(handle)
    except (IOError, OSError, yaml.YAMLError) as error:
        raise ConfigurationError(
            'Cannot read phantom description {0}: {1}'.format(path, error))
    if not isinstance(description, dict) or \
            description.get('version') != PHANTOM_FILE_VERSION:
        raise ConfigurationError(
            'Phantom description {0} must declare version {1}'.format(
                path, PHANTOM_FILE_VERSION))
    return description


@dataclass(frozen=True, eq=False)
class PhantomPair:
    grid: object
    n_e: np.ndarray
    mu_E: np.ndarray
    region_labels: np.ndarray
    region_materials: tuple = ()
    name: str = ''

    def scaled(self, factor):
        return replace(self, n_e=self.n_e * factor, mu_E=self.mu_E * factor)


def _shape_mask(shape, grid):
    x1, x2 = grid.meshgrid()
    kind = shape['type']
    if kind == 'rectangle':
        (c1, c2), (h1, h2) = shape['center'], shape['half_axes']
        return (np.abs(x1 - c1) <= h1) & (np.abs(x2 - c2) <= h2)
    if kind == 'disc':
        (c1, c2), radius = shape['center'], shape['radius']
        return (x1 - c1) ** 2 + (x2 - c2) ** 2 <= radius ** 2
    if kind == 'ellipse':
        (c1, c2), (h1, h2) = shape['center'], shape['half_axes']
        angle = shape.get('angle', 0.0)
        u = (x1 - c1) * math.cos(angle) + (x2 - c2) * math.sin(angle)
        v = -(x1 - c1) * math.sin(angle) + (x2 - c2) * math.cos(angle)
        return (u / h1) ** 2 + (v / h2) ** 2 <= 1.0
    if kind == 'right_triangle':
        (v1, v2), (l1, l2) = shape['vertex'], shape['legs']
        u = (x1 - v1) / l1
        w = (x2 - v2) / l2
        return (u >= 0) & (w >= 0) & (u + w <= 1.0)
    if kind == 'cross':
        c1, c2 = _snap_to_pixel(shape['center'], grid)
        half_length = shape['half_length']
        stroke = shape.get('stroke_pixels', 3)
        horizontal = (np.abs(x2 - c2) < 0.5 * stroke * grid.dx2) & \
            (np.abs(x1 - c1) <= half_length)
        vertical = (np.abs(x1 - c1) < 0.5 * stroke * grid.dx1) & \
            (np.abs(x2 - c2) <= half_length)
        return horizontal | vertical
    raise ConfigurationError('Unknown shape type {0!r}'.format(kind))


def _snap_to_pixel(point, grid):
    i2, i1 = grid.pixel_index(point)
    return grid.x1_centers[i1], grid.x2_centers[i2]


def shape_area(shape, grid):
    """
    Analytic area of a described shape; the cross uses its stroke width on
    the given grid
    """
    kind = shape['type']
    if kind == 'rectangle':
        return 4.0 * shape['half_axes'][0] * shape['half_axes'][1]
    if kind == 'disc':
        return math.pi * shape['radius'] ** 2
    if kind == 'ellipse':
        return math.pi * shape['half_axes'][0] * shape['half_axes'][1]
    if kind == 'right_triangle':
        return 0.5 * abs(shape['legs'][0] * shape['legs'][1])
    if kind == 'cross':
        stroke = shape.get('stroke_pixels', 3)
        w1, w2 = stroke * grid.dx1, stroke * grid.dx2
        length = 2.0 * shape['half_length']
        return length * (w1 + w2) - w1 * w2
    raise ConfigurationError('Unknown shape type {0!r}'.format(kind))


def shape_centroid(shape, grid):
    kind = shape['type']
    if kind == 'right_triangle':
        (v1, v2), (l1, l2) = shape['vertex'], shape['legs']
        return v1 + l1 / 3.0, v2 + l2 / 3.0
    if kind == 'cross':
        return _snap_to_pixel(shape['center'], grid)
    return tuple(shape['center'])


def _fill(grid, labels, materials, background):
    n_e = np.full(grid.shape, background.n_e)
    mu_E = np.full(grid.shape, background.mu_100keV)
    for label, material in enumerate(materials, start=1):
        region = labels == label
        n_e[region] = material.n_e
        mu_E[region] = material.mu_100keV
    return n_e, mu_E


def build_phantom(name, grid, table=None, description=None):
    """
    Rasterize a named phantom of the description file
    :param name: phantom name, one of simple, complex, bar
    :param grid: ImageGrid
    :param table: MaterialTable, the shipped table when omitted
    :param description: parsed phantom description, shipped when omitted
    :return: PhantomPair
    """
    table = table or load_materials()
    description = description or load_phantom_description()
    try:
        shapes = description['phantoms'][name]['shapes']
    except (KeyError, TypeError):
        raise ConfigurationError('Unknown phantom {0!r}'.format(name))
    labels = np.zeros(grid.shape, dtype=np.int32)
    materials = []
    for label, shape in enumerate(shapes, start=1):
        labels[_shape_mask(shape, grid)] = label
        materials.append(table.get(shape['material']))
    background = table.get(description.get('background', table.background))
    n_e, mu_E = _fill(grid, labels, materials, background)
    return PhantomPair(grid, n_e, mu_E, labels, tuple(materials), name)


def simple_phantom(grid, table=None, description=None):
    return build_phantom('simple', grid, table, description)


def complex_phantom(grid, table=None, description=None):
    return build_phantom('complex', grid, table, description)


def bar_phantom(grid, table=None, description=None):
    return build_phantom('bar', grid, table, description)


def _refill(p, materials, table):
    background = table.get(table.background)
    n_e, mu_E = _fill(p.grid, p.region_labels, materials, background)
    return replace(p, n_e=n_e, mu_E=mu_E, region_materials=tuple(materials))


def randomize_materials(p, table, seed):
    """
    Give every region of a phantom a material drawn uniformly from the
    non-background rows of the table
    :param p: PhantomPair
    :param table: MaterialTable
    :param seed: integer seed
    :return: new PhantomPair, background untouched
    """
    candidates = table.candidates()
    if not candidates:
        raise ConfigurationError('Material table has no solid materials')
    rng = np.random.default_rng(seed)
    picks = rng.integers(len(candidates), size=len(p.region_materials))
    return _refill(p, [candidates[i] for i in picks], table)


def with_material(p, material, table):
    return _refill(p, [material] * len(p.region_materials), table)


def region_correlation(p):
    """
    Pearson correlation between the per-region electron densities and
    attenuation values, background included
    """
    labels = np.unique(p.region_labels)
    n_e = [p.n_e[p.region_labels == label].mean() for label in labels]
    mu_E = [p.mu_E[p.region_labels == label].mean() for label in labels]
    if len(labels) < 2:
        return 1.0
    return float(np.corrcoef(n_e, mu_E)[0, 1])


def delta_image(grid, point, width=3):
    """
    Discrete point source: the width x width pixel block centered on the
    pixel containing point
    """
    index = grid.pixel_index(point)
    if index is None:
        raise ConfigurationError(
            'Delta location {0} lies outside the image grid'.format(point))
    i2, i1 = index
    half = width // 2
    image = np.zeros(grid.shape)
    image[max(i2 - half, 0):i2 + half + 1,
          max(i1 - half, 0):i1 + half + 1] = 1.0
    return image


def _slope(n_e, mu):
    return float(np.dot(n_e, mu) / np.dot(n_e, n_e))


@dataclass(eq=False)
class MaterialFit:
    """
    Through-origin line of attenuation against electron density over a
    material table
    """
    nu: float
    names: list
    n_e: np.ndarray
    mu: np.ndarray
    outlier: np.ndarray
    near_origin: np.ndarray
    correlation: float

    @property
    def kept(self):
        return ~(self.outlier | self.near_origin)

    def points(self, kept_only=True):
        mask = self.kept if kept_only else np.ones(self.n_e.size, bool)
        return np.column_stack([self.n_e[mask], self.mu[mask]])

    def as_dict(self):
        return {
            'nu': self.nu,
            'correlation': self.correlation,
            'outliers': [name for name, flag in
                         zip(self.names, self.outlier) if flag],
            'near_origin': [name for name, flag in
                            zip(self.names, self.near_origin) if flag],
        }


def fit_materials(table, e_threshold_Z=20, column='mu_100keV', alpha=0.05,
                  logger=None):
    """
    Slope of attenuation against electron density through the origin
    :param table: MaterialTable with at least three materials
    :param e_threshold_Z: materials whose z_eff column reaches this value
     are skipped, inert when the table has no z_eff column
    :param column: attenuation column to fit
    :param alpha: family-wise level of the studentized-residual outlier test
    :param logger: optional logger
    :return: MaterialFit with the slope, the fitted points and their flags
    """
    logger = logger or LOG
    materials = [m for m in table
                 if m.extra.get('z_eff', 0.0) < e_threshold_Z]
    if len(materials) < 3:
        raise ConfigurationError(
            'Need at least 3 materials to fit, got {0}'.format(
                len(materials)))
    n_e = np.array([m.n_e for m in materials])
    mu = np.array([m.value(column) for m in materials])
    if not np.any(n_e):
        raise ConfigurationError('Degenerate material table')
    keep = np.ones(n_e.size, dtype=bool)

    while keep.sum() > 3:
        nu = _slope(n_e[keep], mu[keep])
        residual = mu - nu * n_e
        sse = np.sum(residual[keep] ** 2)
        if sse <= 1e-24 * np.sum(mu[keep] ** 2):
            break
        count = keep.sum()
        leverage = n_e ** 2 / np.sum(n_e[keep] ** 2)
        # Externally studentized residuals of a one-parameter fit.
        with np.errstate(divide='ignore', invalid='ignore'):
            deleted = (sse - residual ** 2 / (1.0 - leverage)) / (count - 2)
            t_values = np.abs(residual) / np.sqrt(
                np.maximum(deleted, 1e-300) * (1.0 - leverage))
        t_values[~keep] = 0.0
        worst = int(np.argmax(t_values))
        critical = stats.t.ppf(1.0 - alpha / (2.0 * count), count - 2)
        if t_values[worst] <= critical:
            break
        logger.debug('Dropping outlier material {0} (t={1:.2f})'.format(
            materials[worst].name, t_values[worst]))
        keep[worst] = False

    near_origin = (n_e < NEAR_ORIGIN_FRACTION * n_e.max()) & \
        (mu < NEAR_ORIGIN_FRACTION * mu.max())
    outlier = ~keep
    keep &= ~near_origin
    if keep.sum() < 1 or not np.any(n_e[keep]):
        raise ConfigurationError('No materials left after outlier removal')
    if keep.sum() > 1 and np.ptp(n_e[keep]) > 0 and np.ptp(mu[keep]) > 0:
        correlation = float(stats.pearsonr(n_e[keep], mu[keep])[0])
    else:
        correlation = 1.0
    fit = MaterialFit(_slope(n_e[keep], mu[keep]),
                      [m.name for m in materials], n_e, mu, outlier,
                      near_origin, correlation)
    logger.debug('Fitted nu={0} over {1} materials (R={2:.4f})'.format(
        fit.nu, int(keep.sum()), correlation))
    return fit


def fit_nu(table, e_threshold_Z=20, column='mu_100keV', alpha=0.05,
           logger=None):
    return fit_materials(table, e_threshold_Z, column, alpha, logger).nu


class Phantom(TomographyResource):
    resource_type = 'phantom'

    def create(self):
        error_message = self.validate_resource_config(('name',))
        if error_message:
            raise ConfigurationError(error_message)
        if self.config['name'] not in PHANTOM_NAMES:
            raise ConfigurationError(
                'Unknown phantom {0!r}, expected one of {1}'.format(
                    self.config['name'], PHANTOM_NAMES))
        self.logger.debug(
            'Attempting to build phantom with these args: {0}'.format(
                self.config))
        table = load_materials(self.config.get('materials'))
        description = load_phantom_description(
            self.config.get('phantom_file'))
        phantom = build_phantom(self.config['name'], self.geometry.image,
                                table, description)
        self.logger.debug('Built phantom with these materials: {0}'.format(
            [m.name for m in phantom.region_materials]))
        return phantom

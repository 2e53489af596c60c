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
import copy
import csv
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field

# Third party imports
import numpy as np
import scipy.sparse as sp
import yaml

# Local imports
from jointct_sdk.common import ConfigurationError
from jointct_sdk.resources.formats import (line_extents,
                                           toric_extents,
                                           write_grid)
from jointct_sdk.resources.operators import (DerivativeFilter,
                                             RadonOperator,
                                             SparseLinearOperator,
                                             ToricOperator)
from jointct_sdk.resources.solvers import (OperatorSet,
                                           Reconstruction,
                                           alpha_ladder,
                                           select_alpha,
                                           with_norms)
from jointct_cli.constants import (CACHE_FORMAT_VERSION,
                                   CACHE_KINDS,
                                   DEFAULT_RUN_CONFIG,
                                   GEOMETRY_KEYS,
                                   GRID_PRESETS,
                                   GRIDS,
                                   METHODS,
                                   PHANTOMS,
                                   TABLES)

LOG = logging.getLogger(__name__)

SOLVER_KEYS = ('beta', 'huber_delta', 'cgls_iters', 'cgls_restarts',
               'cgls_tol', 'smooth_iters', 'smooth_tol', 'lpls_restarts',
               'seed')


def to_builtin(value):
    """
    Convert numpy scalars and arrays nested in a structure to plain Python
    so they can be dumped as YAML
    """
    if isinstance(value, dict):
        return dict((str(k), to_builtin(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def load_config(path):
    """
    Read a run configuration or a run manifest from YAML
    :param path: file path, nothing is read when empty
    :return: configuration mapping
    """
    if not path:
        return {}
    try:
        with open(path) as handle:
            loaded = yaml.safe_load(handle) or {}
    except (IOError, OSError, yaml.YAMLError) as error:
        raise ConfigurationError(
            'Cannot read configuration {0}: {1}'.format(path, error))
    if not isinstance(loaded, dict):
        raise ConfigurationError(
            'Configuration {0} must be a mapping'.format(path))
    # A manifest carries its resolved configuration under "config".
    if isinstance(loaded.get('config'), dict) and 'command' in loaded:
        loaded = loaded['config']
    unknown = sorted(set(loaded) - set(DEFAULT_RUN_CONFIG))
    if unknown:
        raise ConfigurationError(
            'Unknown configuration keys in {0}: {1}'.format(
                path, ', '.join(unknown)))
    return loaded


def resolve_config(file_config=None, overrides=None):
    """
    Merge defaults, file values and command-line values, later ones win,
    then fill the image rectangle from the grid preset
    :param file_config: mapping read by load_config
    :param overrides: mapping of command-line values, None entries ignored
    :return: resolved configuration
    """
    config = copy.deepcopy(DEFAULT_RUN_CONFIG)
    config.update(file_config or {})
    config.update(dict((key, value) for key, value
                       in (overrides or {}).items() if value is not None))
    if config['grid'] not in GRIDS:
        raise ConfigurationError(
            'Unknown grid {0!r}, expected one of {1}'.format(
                config['grid'], GRIDS))
    for key, value in GRID_PRESETS[config['grid']].items():
        if config.get(key) is None:
            config[key] = value
    return config


def parse_alpha(value):
    """
    :return: None for automatic selection, the weight otherwise
    """
    if value is None or value == 'auto':
        return None
    try:
        alpha = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(
            "alpha must be 'auto' or a number, got {0!r}".format(value))
    if not alpha > 0:
        raise ConfigurationError('alpha must be positive, got {0}'.format(
            alpha))
    return alpha


def validate_config(config):
    """
    Check value ranges of a resolved configuration
    :return: error_message in case the configuration is invalid
    """
    try:
        checks = _range_checks(config)
    except (TypeError, ValueError) as error:
        return 'Invalid configuration value: {0}'.format(error)
    for passed, message in checks:
        if not passed:
            return message
    try:
        parse_alpha(config['alpha'])
    except ConfigurationError as error:
        return str(error)
    return None


def _range_checks(config):
    return (
        (config['method'] in METHODS,
         'Unknown method {0!r}, expected one of {1}'.format(
             config['method'], METHODS)),
        (config['phantom'] in PHANTOMS,
         'Unknown phantom {0!r}, expected one of {1}'.format(
             config['phantom'], PHANTOMS)),
        (config['contour_phantom'] in (None,) + PHANTOMS,
         'Unknown phantom {0!r}'.format(config['contour_phantom'])),
        (config['table'] in TABLES,
         'Unknown table {0!r}, expected one of {1}'.format(
             config['table'], TABLES)),
        (float(config['eta']) >= 0,
         'Noise level must be >= 0, got {0}'.format(config['eta'])),
        (int(config['workers']) >= 1,
         'workers must be >= 1, got {0}'.format(config['workers'])),
        (int(config['runs']) >= 2,
         'runs must be >= 2, got {0}'.format(config['runs'])),
        (int(config['m']) >= 1,
         'Derivative order must be >= 1, got {0}'.format(config['m'])),
    )


def geometry_digest(config, kind):
    """
    SHA-256 of an operator kind and every parameter it depends on
    """
    key = dict((name, config.get(name)) for name in GEOMETRY_KEYS)
    key.update({'kind': kind, 'm': config.get('m'),
                'version': CACHE_FORMAT_VERSION})
    payload = json.dumps(to_builtin(key), sort_keys=True)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def _assemble(kind, geometry, config, logger):
    if kind in ('R_L', 'R'):
        resource = RadonOperator(geometry, {'name': kind,
                                            'limited': kind == 'R_L'},
                                 logger=logger)
    elif kind in ('T', 'T1', 'T2'):
        resource = ToricOperator(
            geometry, {'name': kind,
                       'branch': 'both' if kind == 'T' else int(kind[1]),
                       'arc_refinement': int(config['arc_refinement'])},
            logger=logger)
    elif kind == 'D_m':
        resource = DerivativeFilter(geometry, {'name': kind,
                                               'sinogram': 'line',
                                               'm': int(config['m'])},
                                    logger=logger)
    else:
        resource = DerivativeFilter(geometry, {'name': kind,
                                               'sinogram': 'toric', 'm': 2},
                                    logger=logger)
    return resource.create()


def load_operator(kind, geometry, config, logger=None):
    """
    Assemble an operator, going through the npz cache when a cache
    directory is configured
    :param kind: one of CACHE_KINDS
    :return: SparseLinearOperator
    """
    logger = logger or LOG
    if kind not in CACHE_KINDS:
        raise ConfigurationError('Unknown operator kind {0!r}'.format(kind))
    cache_dir = config.get('cache_dir')
    if not cache_dir:
        return _assemble(kind, geometry, config, logger)
    path = os.path.join(cache_dir, '{0}-{1}.npz'.format(
        kind, geometry_digest(config, kind)))
    labels_path = path[:-len('.npz')] + '.labels.npy'
    if os.path.exists(path):
        logger.debug('Loading cached operator {0} from {1}'.format(
            kind, path))
        row_labels = np.load(labels_path, allow_pickle=False) \
            if os.path.exists(labels_path) else None
        return SparseLinearOperator(sp.load_npz(path), row_labels=row_labels,
                                    name=kind)
    op = _assemble(kind, geometry, config, logger)
    os.makedirs(cache_dir, exist_ok=True)
    sp.save_npz(path, op.matrix)
    if op.row_labels is not None:
        np.save(labels_path, np.asarray(op.row_labels), allow_pickle=False)
    logger.debug('Stored operator {0} in {1}'.format(kind, path))
    return op


def operator_set(geometry, config, logger=None):
    ops = OperatorSet(*(load_operator(kind, geometry, config, logger)
                        for kind in ('R_L', 'T', 'R', 'D_m')),
                      m=int(config['m']))
    return with_norms(ops, seed=int(config['seed']), logger=logger)


def run_method(method, truth, data, ops, geometry, config, nu=None,
               logger=None, mapper=map):
    """
    Run one reconstruction method, searching the weight ladder when alpha
    is 'auto'
    :return: (SolverResult, list of (alpha, eps_mu, eps_ne))
    """
    resource_config = dict((key, config[key]) for key in SOLVER_KEYS)
    resource_config['method'] = method
    resource = Reconstruction(geometry, resource_config, logger=logger)

    def solve(alpha):
        return resource.create(data, ops, alpha, nu=nu)

    alpha = parse_alpha(config['alpha'])
    if alpha is not None:
        return solve(alpha), []
    ladder = alpha_ladder(float(config['alpha_min']),
                          int(config['alpha_decades']),
                          int(config['alpha_per_decade']))
    _, result, scores = select_alpha(solve, truth, ladder,
                                     per_modality=method == 'tv',
                                     mapper=mapper)
    return result, scores


def embed_limited(values, line):
    """
    Place limited-data values into a full (theta, s) sinogram, zero outside
    the data-set mask
    """
    full = np.zeros(line.shape)
    full[line.mask] = values
    return full


def write_line_sinogram(path, values, line, limited=True):
    values = embed_limited(values, line) if limited \
        else np.asarray(values).reshape(line.shape)
    write_grid(path, values, line_extents(line))


def write_toric_sinogram(path, values, toric):
    write_grid(path, np.asarray(values).reshape(toric.shape),
               toric_extents(toric))


def format_number(value):
    if isinstance(value, (float, np.floating)):
        return '%.17g' % value
    return str(value)


def write_csv(path, header, rows):
    with open(path, 'w') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(value) for value in row])


def write_trace(path, trace):
    write_csv(path, ('iteration', 'objective', 'residual'), trace)


@dataclass
class RunManifest:
    command: str
    config: dict
    parameters: dict = field(default_factory=dict)
    checksums: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def add_output(self, key, path, out_dir):
        self.outputs[key] = os.path.relpath(path, out_dir)
        return path

    def as_dict(self):
        return to_builtin({
            'command': self.command,
            'config': self.config,
            'parameters': self.parameters,
            'checksums': self.checksums,
            'timing': self.timing,
            'outputs': self.outputs,
        })

    def write(self, path):
        with open(path, 'w') as handle:
            yaml.safe_dump(self.as_dict(), handle, default_flow_style=False,
                           sort_keys=True)

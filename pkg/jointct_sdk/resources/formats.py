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

# File formats shared by the library and the command line: raw grids (one
# text header line "n1 n2 e1_min e1_max e2_min e2_max" followed by
# little-endian float64 values, row-major), operator triplets and point
# lists.

# Third party imports
import numpy as np
import scipy.sparse as sp

# Local imports
from jointct_sdk.common import ConfigurationError

RAW_DTYPE = '<f8'


def image_extents(img):
    return img.x1_min, img.x1_max, img.x2_min, img.x2_max


def toric_extents(sino):
    x0_min, x0_max = sino.x0_window
    return x0_min, x0_max, float(sino.r_samples[0]), float(
        sino.r_samples[-1])


def line_extents(line):
    return (float(line.s_samples[0]), float(line.s_samples[-1]),
            float(line.theta_samples[0]), float(line.theta_samples[-1]))


def write_grid(path, values, extents):
    """
    Write a 2-D array in the raw grid format
    :param path: destination file
    :param values: array of shape (n2, n1)
    :param extents: (e1_min, e1_max, e2_min, e2_max) of the two axes
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ConfigurationError(
            'Raw grids must be 2-D, got shape {0}'.format(values.shape))
    n2, n1 = values.shape
    header = '{0} {1} {2}\n'.format(
        n1, n2, ' '.join('{0!r}'.format(float(e)) for e in extents))
    with open(path, 'wb') as handle:
        handle.write(header.encode('ascii'))
        handle.write(np.ascontiguousarray(values, dtype=RAW_DTYPE).tobytes())


def read_grid(path):
    """
    Read a raw grid file
    :param path: file written by write_grid
    :return: (values, extents)
    """
    with open(path, 'rb') as handle:
        header = handle.readline().decode('ascii').split()
        payload = handle.read()
    try:
        n1, n2 = int(header[0]), int(header[1])
        extents = tuple(float(e) for e in header[2:6])
    except (IndexError, ValueError):
        raise ConfigurationError('Malformed raw grid header in {0}'.format(
            path))
    values = np.frombuffer(payload, dtype=RAW_DTYPE)
    if values.size != n1 * n2 or len(extents) != 4:
        raise ConfigurationError(
            'Raw grid {0} holds {1} values, header announces {2}x{3}'.format(
                path, values.size, n1, n2))
    return values.reshape(n2, n1).astype(float), extents


def write_triplets(path, op):
    coo = op.matrix.tocoo()
    with open(path, 'w') as handle:
        handle.write('{0} {1} {2}\n'.format(op.n_rows, op.n_cols, coo.nnz))
        for row, col, weight in zip(coo.row, coo.col, coo.data):
            handle.write('{0} {1} {2!r}\n'.format(row, col, float(weight)))


def read_triplets(path):
    """
    Read an operator written by write_triplets
    :return: scipy CSR matrix with the stored shape
    """
    with open(path) as handle:
        n_rows, n_cols, nnz = (int(v) for v in handle.readline().split())
        entries = np.loadtxt(handle, ndmin=2) if nnz else np.zeros((0, 3))
    if entries.shape[0] != nnz:
        raise ConfigurationError(
            'Triplet file {0} announces {1} entries, found {2}'.format(
                path, nnz, entries.shape[0]))
    return sp.csr_matrix(
        (entries[:, 2], (entries[:, 0].astype(int),
                         entries[:, 1].astype(int))),
        shape=(n_rows, n_cols))


def write_points(path, points):
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    with open(path, 'w') as handle:
        for x1, x2 in points:
            handle.write('{0!r} {1!r}\n'.format(float(x1), float(x2)))


def read_points(path):
    return np.loadtxt(path, ndmin=2).reshape(-1, 2)

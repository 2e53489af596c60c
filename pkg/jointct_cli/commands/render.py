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
import os

# Third party imports
import numpy as np

# Local imports
from jointct_sdk.common import ConfigurationError
from jointct_sdk.resources.formats import read_grid, read_points
from jointct_sdk.resources.geometry import ImageGrid
from jointct_cli.constants import PGM_SUFFIX, PNG_SUFFIX
from jointct_cli.decorators import with_run_context


def window(values):
    """
    Min-max window of a grid mapped onto 0..255, a constant grid maps to 0
    :return: (uint8 image, (low, high))
    """
    low, high = float(np.min(values)), float(np.max(values))
    if high > low:
        scaled = np.round((values - low) / (high - low) * 255.0)
    else:
        scaled = np.zeros(values.shape)
    return scaled.astype(np.uint8), (low, high)


def write_pgm(path, image):
    """
    Write an 8-bit binary portable graymap; the first stored row (lowest
    x2) ends up at the bottom of the picture
    """
    rows, cols = image.shape
    with open(path, 'wb') as handle:
        handle.write('P5\n{0} {1}\n255\n'.format(cols, rows).encode('ascii'))
        handle.write(np.ascontiguousarray(np.flipud(image)).tobytes())


def overlay_pixels(grid, points):
    """
    Pixel positions of physical points, as plotted on an image drawn with
    its origin in the lower left corner
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return grid.to_pixel_coordinates(points[:, 0], points[:, 1])


def write_png(path, image, grid, overlays):
    # Imported here so the headless paths never load a plotting backend.
    import matplotlib
    matplotlib.use('Agg')
    from matplotlib import pyplot as plt

    rows, cols = image.shape
    figure = plt.figure(figsize=(cols / 100.0, rows / 100.0), dpi=100)
    axes = figure.add_axes([0, 0, 1, 1])
    axes.imshow(image, cmap='gray', origin='lower', vmin=0, vmax=255,
                interpolation='nearest')
    for points in overlays:
        col, row = overlay_pixels(grid, points)
        axes.plot(col, row, '.', color='red', markersize=1)
    axes.set_xlim(-0.5, cols - 0.5)
    axes.set_ylim(-0.5, rows - 0.5)
    axes.axis('off')
    figure.savefig(path, dpi=100)
    plt.close(figure)


@with_run_context('render')
def render(context):
    """
    Render a raw image grid to PGM, optionally to PNG with artifact curves
    drawn on top
    """
    config = context.config
    source = config.get('input')
    if not source:
        raise ConfigurationError('render needs an input grid file')
    values, extents = read_grid(source)
    image, (low, high) = window(values)
    stem = os.path.splitext(os.path.basename(source))[0]
    write_pgm(context.output('pgm', stem + PGM_SUFFIX), image)

    if config.get('png'):
        n2, n1 = values.shape
        grid = ImageGrid(extents[0], extents[1], extents[2], extents[3],
                         n1, n2)
        overlays = [read_points(path) for path in config.get('overlay') or ()]
        write_png(context.output('png', stem + PNG_SUFFIX), image, grid,
                  overlays)
    context.manifest.parameters.update({
        'input': os.path.abspath(source),
        'window': [low, high],
    })
    return True

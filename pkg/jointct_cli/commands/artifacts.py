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

# Local imports
from jointct_sdk.resources.formats import (image_extents,
                                           write_grid,
                                           write_points)
from jointct_sdk.resources.microlocal import (artifact_curves,
                                              artifact_support_sets,
                                              visibility_map)
from jointct_sdk.resources.phantoms import delta_image
from jointct_cli.constants import (BACKPROJECTION_FILE,
                                   CONTOUR_FILE,
                                   CURVE_FILE,
                                   SUPPORT_FILE,
                                   VISIBILITY_FILE,
                                   XRAY_DELTA_FILE)
from jointct_cli.decorators import with_run_context

XRAY_DELTA_HEIGHT = -1.0


def toric_backprojections(T1, T2, phi, f, shape):
    """
    Normal-operator images of f split into local and cross branch terms,
    unfiltered and with the sinogram filter phi in between
    :return: dict name -> image
    """
    x = f.ravel()
    g1, g2 = T1.apply(x), T2.apply(x)
    h1, h2 = phi.apply(g1), phi.apply(g2)
    local = T1.apply_adjoint(g1) + T2.apply_adjoint(g2)
    cross = T1.apply_adjoint(g2) + T2.apply_adjoint(g1)
    filtered_local = T1.apply_adjoint(h1) + T2.apply_adjoint(h2)
    filtered_cross = T1.apply_adjoint(h2) + T2.apply_adjoint(h1)
    images = {
        'normal': local + cross,
        'local': local,
        'cross': cross,
        'filtered_normal': filtered_local + filtered_cross,
        'filtered_local': filtered_local,
        'filtered_cross': filtered_cross,
    }
    return dict((name, image.reshape(shape))
                for name, image in images.items())


@with_run_context('predict-artifacts')
def predict_artifacts(context):
    """
    Predict where the toric and limited-angle data produce artifacts and
    compare with the backprojections of point sources
    """
    config = context.config
    geometry = context.geometry
    img, cfg = geometry.image, geometry.scanner
    extents = image_extents(img)
    y = tuple(float(v) for v in config['delta'])
    n_directions = int(config['n_directions'])

    context.logger.info('Computing visibility on {0}'.format(img))
    write_grid(context.output('visibility', VISIBILITY_FILE),
               visibility_map(img, cfg, n_directions), extents)

    context.logger.info('Predicting artifacts of a point at {0}'.format(y))
    support = artifact_support_sets(y, img, cfg)
    write_grid(context.output('artifact_support', SUPPORT_FILE),
               support.astype(float), extents)
    for name, points in artifact_curves(y, cfg, n_directions).items():
        write_points(context.output(name, CURVE_FILE.format(name)), points)

    T1, T2 = context.operator('T1'), context.operator('T2')
    phi = context.operator('D_toric')
    delta = delta_image(img, y)
    for name, image in toric_backprojections(T1, T2, phi, delta,
                                             img.shape).items():
        key = 'delta_{0}'.format(name)
        write_grid(context.output(key, BACKPROJECTION_FILE.format(key)),
                   image, extents)

    R_L = context.operator('R_L')
    for offset in config['xray_offsets']:
        point = (float(offset), XRAY_DELTA_HEIGHT)
        source = delta_image(img, point).ravel()
        image = R_L.apply_adjoint(R_L.apply(source)).reshape(img.shape)
        write_grid(context.output('xray_delta_{0}'.format(offset),
                                  XRAY_DELTA_FILE.format(offset)),
                   image, extents)

    if config.get('contour_phantom'):
        phantom = context.phantom(config['contour_phantom'])
        images = toric_backprojections(T1, T2, phi, phantom.n_e, img.shape)
        write_grid(context.output('contour',
                                  CONTOUR_FILE.format(phantom.name)),
                   images['filtered_normal'], extents)

    context.manifest.parameters.update({
        'delta': list(y),
        'support_pixels': int(support.sum()),
    })
    return True

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
from jointct_sdk.resources.formats import image_extents, write_grid
from jointct_sdk.resources.solvers import add_noise, simulate_data
from jointct_cli.constants import (B1_FILE,
                                   B1_NOISY_FILE,
                                   B2_FILE,
                                   B2_NOISY_FILE,
                                   TRUTH_MU_E_FILE,
                                   TRUTH_N_E_FILE)
from jointct_cli.decorators import with_run_context
from jointct_cli.utils import write_line_sinogram, write_toric_sinogram


def write_truth(context, phantom):
    extents = image_extents(phantom.grid)
    write_grid(context.output('truth_n_e', TRUTH_N_E_FILE), phantom.n_e,
               extents)
    write_grid(context.output('truth_mu_E', TRUTH_MU_E_FILE), phantom.mu_E,
               extents)


@with_run_context('simulate')
def simulate(context):
    """
    Write the clean and noisy transmission and Compton data of the
    configured phantom
    """
    config = context.config
    geometry = context.geometry
    phantom = context.phantom()
    ops = context.operators()
    b1, b2 = simulate_data(phantom, ops)
    nu = context.nu()
    noisy = add_noise(np.concatenate([b1, b2]), float(config['eta']),
                      int(config['seed']))
    context.logger.info('Simulated {0} transmission and {1} Compton '
                        'samples'.format(b1.size, b2.size))
    context.logger.info('Proportionality constant for the material table: '
                        '{0:.4f}'.format(nu))

    write_truth(context, phantom)
    write_line_sinogram(context.output('b1', B1_FILE), b1, geometry.line)
    write_toric_sinogram(context.output('b2', B2_FILE), b2, geometry.toric)
    write_line_sinogram(context.output('b1_noisy', B1_NOISY_FILE),
                        noisy[:b1.size], geometry.line)
    write_toric_sinogram(context.output('b2_noisy', B2_NOISY_FILE),
                         noisy[b1.size:], geometry.toric)
    context.manifest.parameters.update({
        'eta': float(config['eta']),
        'seed': int(config['seed']),
        'materials': [m.name for m in phantom.region_materials],
    })
    return True

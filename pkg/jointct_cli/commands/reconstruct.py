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
from jointct_sdk.resources.formats import (image_extents,
                                           read_grid,
                                           write_grid)
from jointct_sdk.resources.metrics import evaluate, format_table
from jointct_sdk.resources.solvers import NoisyData, make_noisy_data
from jointct_cli.constants import (ALPHA_SCORES_FILE,
                                   B1_NOISY_FILE,
                                   B2_NOISY_FILE,
                                   MU_E_FILE,
                                   N_E_FILE,
                                   REPORT_FILE,
                                   TRACE_FILE)
from jointct_cli.decorators import with_run_context
from jointct_cli.utils import run_method, write_csv, write_trace


def load_data(data_dir, geometry, phantom, config):
    """
    Read noisy sinograms written by the simulate command and normalize
    them the way make_noisy_data does
    :return: NoisyData
    """
    line, toric = geometry.line, geometry.toric
    b1, _ = read_grid(os.path.join(data_dir, B1_NOISY_FILE))
    b2, _ = read_grid(os.path.join(data_dir, B2_NOISY_FILE))
    if b1.shape != line.shape or b2.shape != toric.shape:
        raise ConfigurationError(
            'Data in {0} does not match the configured geometry'.format(
                data_dir))
    scale = float(np.max(phantom.n_e)) or 1.0
    return NoisyData(b1[line.mask] / scale, b2.ravel() / scale,
                     float(config['eta']), int(config['seed']), scale)


def write_result(context, result, truth, config):
    """
    Write the reconstructed pair, its metric report and objective trace
    :return: MetricReport
    """
    method = result.method
    extents = image_extents(result.pair.grid)
    write_grid(context.output('{0}_n_e'.format(method),
                              N_E_FILE.format(method)),
               result.pair.n_e, extents)
    write_grid(context.output('{0}_mu_E'.format(method),
                              MU_E_FILE.format(method)),
               result.pair.mu_E, extents)
    write_trace(context.output('{0}_trace'.format(method),
                               TRACE_FILE.format(method)), result.trace)
    return evaluate(truth, result.pair, float(config['tau']),
                    float(config['tau_g']), int(config['edge_tolerance']))


@with_run_context('reconstruct')
def reconstruct(context):
    """
    Run the configured method on simulated or previously written data and
    score it against the phantom
    """
    config = context.config
    method = config['method']
    geometry = context.geometry
    truth = context.phantom()
    ops = context.operators()
    if config.get('data_dir'):
        data = load_data(config['data_dir'], geometry, truth, config)
    else:
        data = make_noisy_data(truth, ops, float(config['eta']),
                               int(config['seed']))
    nu = context.nu() if method == 'jlam' else None

    context.logger.info('Reconstructing {0} phantom with {1}'.format(
        truth.name, method))
    result, scores = run_method(method, truth, data, ops, geometry, config,
                                nu=nu, logger=context.logger)
    report = write_result(context, result, truth, config)
    with open(context.output('report', REPORT_FILE), 'w') as handle:
        handle.write(format_table({method: report}))
    if scores:
        write_csv(context.output('alpha_scores',
                                 ALPHA_SCORES_FILE.format(method)),
                  ('alpha', 'eps_mu', 'eps_ne'), scores)

    context.manifest.parameters.update({
        'method': method,
        'alpha': result.alpha,
        'eta': data.eta,
        'seed': data.seed,
        'converged': result.converged,
        'iterations': result.iterations,
        'metrics': report.as_dict(),
    })
    context.logger.info('Finished {0}: {1}'.format(method,
                                                   report.as_dict()))
    return result.converged

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
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

# Local imports
from jointct_sdk.resources.metrics import (batch_stats,
                                           evaluate,
                                           format_table)
from jointct_sdk.resources.phantoms import randomize_materials, with_material
from jointct_sdk.resources.solvers import make_noisy_data
from jointct_cli.constants import (JOINT_METHODS,
                                   METHODS,
                                   TABLE_FILE,
                                   TABLE_PHANTOMS)
from jointct_cli.decorators import with_run_context
from jointct_cli.utils import run_method


def run_solves(jobs, workers):
    """
    Run independent solves in a thread pool
    :param jobs: list of zero-argument callables
    :param workers: pool size
    :return: results in submission order
    """
    if workers <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [future.result() for future in futures]


def _job(method, truth, data, context, nu):
    config = context.config

    def job():
        result, _ = run_method(method, truth, data, context.operators(),
                               context.geometry, config, nu=nu,
                               logger=context.logger)
        report = evaluate(truth, result.pair, float(config['tau']),
                          float(config['tau_g']),
                          int(config['edge_tolerance']))
        return result, report
    return job


def randomized_phantoms(context, base):
    """
    Material variants of a phantom: one per table entry for the bar
    phantom, seeded draws otherwise
    :return: list of (label, PhantomPair)
    """
    table = context.materials
    if base.name == 'bar':
        return [(material.name, with_material(base, material, table))
                for material in table.candidates()]
    seed = int(context.config['seed'])
    return [(str(seed + run), randomize_materials(base, table, seed + run))
            for run in range(int(context.config['runs']))]


def reproduce_table(context, table_name):
    config = context.config
    truth = context.phantom(TABLE_PHANTOMS[table_name])
    ops = context.operators()
    data = make_noisy_data(truth, ops, float(config['eta']),
                           int(config['seed']))
    nu = context.nu()
    jobs = [_job(method, truth, data, context, nu) for method in METHODS]
    outcomes = run_solves(jobs, int(config['workers']))
    columns = OrderedDict((result.method, report)
                          for result, report in outcomes)
    return columns, [result for result, _ in outcomes]


def reproduce_randomized(context):
    config = context.config
    base = context.phantom()
    ops = context.operators()
    nu = context.nu()
    variants = randomized_phantoms(context, base)
    jobs = []
    for index, (_, truth) in enumerate(variants):
        data = make_noisy_data(truth, ops, float(config['eta']),
                               int(config['seed']) + index)
        jobs.extend(_job(method, truth, data, context, nu)
                    for method in JOINT_METHODS)
    outcomes = run_solves(jobs, int(config['workers']))
    columns = OrderedDict()
    for method in JOINT_METHODS:
        reports = [report for result, report in outcomes
                   if result.method == method]
        columns[method] = batch_stats(reports)
    context.manifest.parameters['variants'] = [label for label, _
                                               in variants]
    return columns, [result for result, _ in outcomes]


@with_run_context('reproduce')
def reproduce(context):
    """
    Run the full comparison protocol and write a metrics table
    """
    table_name = context.config['table']
    context.operators()
    context.logger.info('Reproducing table {0}'.format(table_name))
    if table_name == 'randomized':
        columns, results = reproduce_randomized(context)
    else:
        columns, results = reproduce_table(context, table_name)
    with open(context.output('table', TABLE_FILE.format(table_name)),
              'w') as handle:
        handle.write(format_table(columns))
    context.manifest.parameters.update({
        'table': table_name,
        'solves': len(results),
        'converged': all(result.converged for result in results),
        'alpha': dict((str(i), result.alpha)
                      for i, result in enumerate(results)),
    })
    return all(result.converged for result in results)

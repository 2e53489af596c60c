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
import argparse
import logging
import sys

# Local imports
from jointct_cli.commands.artifacts import predict_artifacts
from jointct_cli.commands.reconstruct import reconstruct
from jointct_cli.commands.render import render
from jointct_cli.commands.reproduce import reproduce
from jointct_cli.commands.simulate import simulate
from jointct_cli.constants import GRIDS, METHODS, PHANTOMS, TABLES

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def _common_arguments(parser):
    parser.add_argument('--config', help='YAML run configuration or a '
                                         'manifest of a previous run')
    parser.add_argument('--out', default='.', help='output directory')
    parser.add_argument('--grid', choices=GRIDS, help='image grid preset')
    parser.add_argument('--seed', type=int, help='noise seed')
    parser.add_argument('--cache-dir', dest='cache_dir',
                        help='directory of cached operators')
    parser.add_argument('--verbose', action='store_true',
                        help='log at DEBUG level')


def _experiment_arguments(parser):
    parser.add_argument('--phantom', choices=PHANTOMS, help='phantom name')
    parser.add_argument('--eta', type=float, help='relative noise level')
    parser.add_argument('--alpha', help="regularization weight or 'auto'")
    parser.add_argument('--workers', type=int, help='solver threads')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='jointct',
        description='Joint X-ray and Compton scatter tomography')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    sub = commands.add_parser('simulate', help='simulate sinograms')
    _common_arguments(sub)
    _experiment_arguments(sub)
    sub.set_defaults(func=simulate)

    sub = commands.add_parser('reconstruct', help='reconstruct a phantom')
    _common_arguments(sub)
    _experiment_arguments(sub)
    sub.add_argument('--method', choices=METHODS, help='solver')
    sub.add_argument('--data', dest='data_dir',
                     help='output directory of a simulate run')
    sub.set_defaults(func=reconstruct)

    sub = commands.add_parser('predict-artifacts',
                              help='visibility and artifact prediction')
    _common_arguments(sub)
    sub.add_argument('--phantom', dest='contour_phantom', choices=PHANTOMS,
                     help='also write the filtered toric backprojection of '
                          'this phantom')
    sub.set_defaults(func=predict_artifacts)

    sub = commands.add_parser('reproduce', help='run a comparison table')
    _common_arguments(sub)
    _experiment_arguments(sub)
    sub.add_argument('table', choices=TABLES)
    sub.add_argument('--runs', type=int, help='randomized draws')
    sub.set_defaults(func=reproduce)

    sub = commands.add_parser('render', help='render a grid file')
    _common_arguments(sub)
    sub.add_argument('input', help='raw grid file')
    sub.add_argument('--png', action='store_true', default=None,
                     help='also write a PNG')
    sub.add_argument('--overlay', action='append',
                     help='point list drawn over the PNG')
    sub.set_defaults(func=render)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(format=LOG_FORMAT,
                        level=logging.DEBUG if args.verbose else logging.INFO)
    return args.func(args)


if __name__ == '__main__':
    sys.exit(main())

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
import functools
import logging
import os
import time

# Local imports
from jointct_sdk.common import (ConfigurationError,
                                ConvergenceError,
                                TomographyError)
from jointct_sdk.resources.formats import write_points
from jointct_sdk.resources.geometry import Geometry
from jointct_sdk.resources.phantoms import (Phantom,
                                            fit_materials,
                                            load_materials,
                                            region_correlation)
from jointct_cli.constants import (CONFIG_ERROR_MSG,
                                   EXIT_CONFIG_ERROR,
                                   EXIT_FAILURE,
                                   EXIT_NOT_CONVERGED,
                                   EXIT_OK,
                                   MANIFEST_FILE,
                                   NOT_CONVERGED_MSG,
                                   NU_FIT_FILE)
from jointct_cli.utils import (RunManifest,
                               load_config,
                               load_operator,
                               operator_set,
                               resolve_config,
                               validate_config)

# Command-line attributes that map onto configuration keys
OVERRIDE_ARGS = ('phantom', 'method', 'eta', 'seed', 'alpha', 'grid',
                 'workers', 'runs', 'data_dir', 'contour_phantom', 'table',
                 'input', 'overlay', 'png', 'cache_dir')


class RunContext(object):
    """
    Everything a command needs: the resolved configuration, the output
    directory, the manifest being filled and lazily built resources
    """

    def __init__(self, command, config, out_dir, logger):
        self.command = command
        self.config = config
        self.out_dir = out_dir
        self.logger = logger
        self.manifest = RunManifest(command, config)
        self._geometry = None
        self._operators = None
        self._table = None

    @property
    def geometry(self):
        if self._geometry is None:
            self._geometry = Geometry.from_mapping(self.config)
        return self._geometry

    @property
    def materials(self):
        if self._table is None:
            self._table = load_materials(self.config.get('materials'))
        return self._table

    def operators(self):
        if self._operators is None:
            self.logger.info('Preparing operators for {0}'.format(
                self.geometry.image))
            self._operators = operator_set(self.geometry, self.config,
                                           self.logger)
            self.manifest.checksums.update(self._operators.checksums())
            self.manifest.parameters['w'] = self._operators.w
        return self._operators

    def operator(self, kind):
        op = load_operator(kind, self.geometry, self.config, self.logger)
        self.manifest.checksums[kind] = op.checksum()
        return op

    def phantom(self, name=None):
        name = name or self.config['phantom']
        phantom = Phantom(self.geometry,
                          {'name': name,
                           'materials': self.config.get('materials'),
                           'phantom_file': self.config.get('phantom_file')},
                          logger=self.logger).create()
        self.manifest.parameters.setdefault(
            'region_correlation', {})[name] = region_correlation(phantom)
        return phantom

    def nu(self):
        if self.config.get('nu') is not None:
            nu = float(self.config['nu'])
        else:
            fit = fit_materials(self.materials, logger=self.logger)
            write_points(self.output('nu_fit', NU_FIT_FILE), fit.points())
            self.manifest.parameters['nu_fit'] = fit.as_dict()
            nu = fit.nu
        self.manifest.parameters['nu'] = nu
        return nu

    def output(self, key, file_name):
        path = os.path.join(self.out_dir, file_name)
        return self.manifest.add_output(key, path, self.out_dir)


def _overrides(args):
    return dict((name, getattr(args, name)) for name in OVERRIDE_ARGS
                if getattr(args, name, None) is not None)


def with_run_context(command):
    """
    Wrap a command so it receives a RunContext, and turn its outcome into
    an exit code
    :param command: command name recorded in the manifest
    :return: a wrapper returning 0 on success, 2 on configuration errors
     and 3 when a solve did not converge; other exceptions propagate after
     the manifest is written with exit code 1
    """

    def wrapper_outer(func):
        @functools.wraps(func)
        def wrapper_inner(args, logger=None):
            logger = logger or logging.getLogger(
                'jointct.{0}'.format(command))
            try:
                config = resolve_config(load_config(args.config),
                                        _overrides(args))
                error_message = validate_config(config)
                if error_message:
                    raise ConfigurationError(error_message)
                out_dir = os.path.abspath(args.out)
                os.makedirs(out_dir, exist_ok=True)
            except ConfigurationError as error:
                logger.error(CONFIG_ERROR_MSG.format(error))
                return EXIT_CONFIG_ERROR

            context = RunContext(command, config, out_dir, logger)
            started = time.time()
            exit_code = EXIT_OK
            try:
                logger.info('Running {0} with output in {1}'.format(
                    command, out_dir))
                if func(context) is False:
                    logger.warning(NOT_CONVERGED_MSG.format(command, out_dir))
                    exit_code = EXIT_NOT_CONVERGED
            except ConfigurationError as error:
                logger.error(CONFIG_ERROR_MSG.format(error))
                exit_code = EXIT_CONFIG_ERROR
            except ConvergenceError as error:
                logger.error('{0} failed to converge: {1}'.format(
                    command, error))
                exit_code = EXIT_NOT_CONVERGED
            except TomographyError as error:
                logger.error('{0} failed: {1}'.format(command, error))
                exit_code = EXIT_CONFIG_ERROR
            except Exception:
                exit_code = EXIT_FAILURE
                raise
            finally:
                context.manifest.timing['seconds'] = time.time() - started
                context.manifest.parameters['exit_code'] = exit_code
                context.manifest.write(os.path.join(out_dir, MANIFEST_FILE))
            return exit_code

        return wrapper_inner
    return wrapper_outer

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
import logging


class TomographyError(Exception):
    pass


class ConfigurationError(TomographyError):
    pass


class GeometryError(TomographyError):
    pass


class InvisibleDirectionError(GeometryError):
    pass


class DimensionMismatchError(TomographyError):
    pass


class MetricError(TomographyError):
    pass


class ConvergenceError(TomographyError):

    def __init__(self, message, last_iterate=None):
        super(ConvergenceError, self).__init__(message)
        self.last_iterate = last_iterate


class TomographyResource(object):
    resource_type = None

    def __init__(self, geometry, resource_config=None, logger=None):
        self.geometry = geometry
        self.config = resource_config or {}
        self.name = self.config.get('name') or self.resource_type
        self.logger = logger or logging.getLogger(self.__module__)

    def __str__(self):
        return '{0}:{1}'.format(self.resource_type, self.name)

    def validate_resource_config(self, required=()):
        """
        Check that every key this resource needs before running an
        operation is present in its resource config
        :param required: iterable of config keys the operation needs
        :return: error_message in case the resource config is invalid
        """
        error_message = None
        if not isinstance(self.config, dict):
            return 'Resource config must be a mapping, got: {0}' \
                   ''.format(type(self.config).__name__)

        missing = [key for key in required if self.config.get(key) is None]
        if missing:
            error_message = 'Resource config for {0} is missing: {1}' \
                            ''.format(self, ', '.join(missing))
        return error_message

    def create(self):
        raise NotImplementedError()

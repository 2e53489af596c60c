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

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NOT_CONVERGED = 3

# Choices exposed on the command line
METHODS = ('tv', 'jlam', 'jtv', 'lpls')
JOINT_METHODS = ('jlam', 'jtv', 'lpls')
PHANTOMS = ('simple', 'complex', 'bar')
GRIDS = ('default', 'extended')
TABLES = ('T1', 'T2', 'TB1', 'randomized')
TABLE_PHANTOMS = {
    'T1': 'simple',
    'T2': 'complex',
    'TB1': 'bar',
}

# Image rectangles and pixel counts of the named grids
GRID_PRESETS = {
    'default': {'x1_min': -2.0, 'x1_max': 2.0,
                'x2_min': -3.0, 'x2_max': 1.0, 'n1': 200, 'n2': 200},
    'extended': {'x1_min': -3.0, 'x1_max': 3.0,
                 'x2_min': -4.0, 'x2_max': 2.0, 'n1': 300, 'n2': 300},
}

GEOMETRY_KEYS = ('a', 'r_m', 'r_M', 'source_height',
                 'x1_min', 'x1_max', 'x2_min', 'x2_max', 'n1', 'n2',
                 'n_r', 'r_step', 'n_x0', 'x0_start', 'x0_step',
                 'n_theta', 's_step', 'arc_refinement')

DEFAULT_RUN_CONFIG = {
    # Scanner
    'a': 4.0,
    'r_m': 7.0,
    'r_M': 9.0,
    'source_height': 3.0,
    # Image grid, filled from the grid preset when left empty
    'grid': 'default',
    'x1_min': None,
    'x1_max': None,
    'x2_min': None,
    'x2_max': None,
    'n1': None,
    'n2': None,
    # Sinograms
    'n_r': 400,
    'r_step': 0.02,
    'n_x0': 200,
    'x0_start': -4.0,
    'x0_step': 0.04,
    'n_theta': 180,
    's_step': None,
    'arc_refinement': 4,
    # Experiment
    'phantom': 'simple',
    'method': 'jlam',
    'eta': 0.1,
    'seed': 0,
    'alpha': 'auto',
    'beta': 0.01,
    'm': 2,
    'nu': None,
    'huber_delta': 0.01,
    'cgls_iters': 200,
    'cgls_restarts': 10,
    'cgls_tol': 1e-6,
    'smooth_iters': 2000,
    'smooth_tol': 1e-7,
    'lpls_restarts': 1,
    'alpha_min': 1e-4,
    'alpha_decades': 4,
    'alpha_per_decade': 10,
    'tau': 0.1,
    'tau_g': 0.2,
    'edge_tolerance': 1,
    'runs': 100,
    'workers': 1,
    'delta': [0.0, -1.0],
    'xray_offsets': [0.0, 0.5, 1.0, 1.5],
    'n_directions': 720,
    'materials': None,
    'phantom_file': None,
    'cache_dir': None,
    'png': False,
    'data_dir': None,
    'contour_phantom': None,
    'table': 'T1',
    'input': None,
    'overlay': [],
}

# Output file names
MANIFEST_FILE = 'manifest.yaml'
B1_FILE = 'b1.grid'
B2_FILE = 'b2.grid'
B1_NOISY_FILE = 'b1_noisy.grid'
B2_NOISY_FILE = 'b2_noisy.grid'
N_E_FILE = '{0}_n_e.grid'
MU_E_FILE = '{0}_mu_E.grid'
TRUTH_N_E_FILE = 'truth_n_e.grid'
TRUTH_MU_E_FILE = 'truth_mu_E.grid'
REPORT_FILE = 'report.csv'
TRACE_FILE = '{0}_trace.csv'
ALPHA_SCORES_FILE = '{0}_alpha_scores.csv'
VISIBILITY_FILE = 'visibility.grid'
SUPPORT_FILE = 'artifact_support.grid'
CURVE_FILE = '{0}.points'
NU_FIT_FILE = 'nu_fit.points'
BACKPROJECTION_FILE = '{0}.grid'
XRAY_DELTA_FILE = 'xray_delta_{0}.grid'
CONTOUR_FILE = 'contour_{0}.grid'
TABLE_FILE = '{0}.csv'
PGM_SUFFIX = '.pgm'
PNG_SUFFIX = '.png'

# Operator cache
CACHE_KINDS = ('R_L', 'R', 'T', 'T1', 'T2', 'D_m', 'D_toric')
CACHE_FORMAT_VERSION = 2

# Message constants
NOT_CONVERGED_MSG = \
    '{0} did not converge; outputs were written to {1}'
CONFIG_ERROR_MSG = 'Configuration error: {0}'

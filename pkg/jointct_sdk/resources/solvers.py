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

# Data simulation and the four joint reconstruction methods: the stacked
# lambda-regularized least squares (JLAM), separate Huber-TV, joint TV and
# linear parallel level sets. All methods work on data normalized so the
# electron density phantom has unit maximum; the scale is undone on output.

# Standard imports
import logging
import math
from dataclasses import dataclass, field, replace

# Third party imports
import numpy as np
import scipy.sparse as sp

# Local imports
from jointct_sdk.common import (ConfigurationError,
                                DimensionMismatchError,
                                TomographyResource)
from jointct_sdk.resources.metrics import rel_error
from jointct_sdk.resources.operators import (SparseLinearOperator,
                                             assemble_radon,
                                             assemble_toric,
                                             derivative_filter,
                                             spectral_norm)
from jointct_sdk.resources.phantoms import PhantomPair

LOG = logging.getLogger(__name__)

METHODS = ('tv', 'jlam', 'jtv', 'lpls')
DEFAULT_BETA = 0.01
DEFAULT_HUBER_DELTA = 0.01
MIN_STEP = 1e-20


@dataclass(frozen=True, eq=False)
class OperatorSet:
    R_L: SparseLinearOperator
    T: SparseLinearOperator
    R: SparseLinearOperator
    D_m: SparseLinearOperator
    m: int = 2
    norm_R_L: float = None
    norm_T: float = None
    norm_lambda: float = None

    @property
    def w(self):
        return self.norm_T / self.norm_R_L

    def checksums(self):
        return dict((name, getattr(self, name).checksum())
                    for name in ('R_L', 'T', 'R', 'D_m'))


@dataclass(frozen=True, eq=False)
class JointSystem:
    R_L: SparseLinearOperator
    T: SparseLinearOperator
    R: SparseLinearOperator
    D_m: SparseLinearOperator
    w: float
    nu: float
    alpha: float
    m: int = 2
    alpha_relative: float = None


@dataclass(frozen=True, eq=False)
class NoisyData:
    b1: np.ndarray
    b2: np.ndarray
    eta: float
    seed: int
    # Data are stored for the phantom divided by scale.
    scale: float = 1.0


@dataclass(eq=False)
class SolverResult:
    pair: PhantomPair
    method: str
    converged: bool
    iterations: int
    alpha: object
    trace: list = field(default_factory=list)
    objective: float = float('nan')
    extra: dict = field(default_factory=dict)


def build_operators(geometry, m=2, norm_iters=200, norm_tol=1e-4, seed=0,
                    logger=None):
    """
    Assemble every operator a joint reconstruction needs
    :param geometry: Geometry
    :param m: order of the sinogram derivative filter
    :return: OperatorSet with power-iteration norms of R_L and T
    """
    logger = logger or LOG
    image, scanner = geometry.image, geometry.scanner
    R_L = assemble_radon(image, geometry.line, True, scanner, logger=logger)
    R = assemble_radon(image, geometry.line, False, scanner, logger=logger)
    T = assemble_toric(image, geometry.toric, scanner, 'both', logger=logger)
    D_m = derivative_filter(geometry.line, m)
    return with_norms(OperatorSet(R_L, T, R, D_m, m), norm_iters, norm_tol,
                      seed, logger)


def with_norms(ops, norm_iters=200, norm_tol=1e-4, seed=0, logger=None):
    norm_R_L = spectral_norm(ops.R_L, norm_iters, norm_tol, seed,
                             strict=False, logger=logger)
    norm_T = spectral_norm(ops.T, norm_iters, norm_tol, seed, strict=False,
                           logger=logger)
    lambda_op = SparseLinearOperator(ops.D_m.matrix.dot(ops.R.matrix),
                                     name='D_m R')
    norm_lambda = spectral_norm(lambda_op, norm_iters, norm_tol, seed,
                                strict=False, logger=logger)
    return replace(ops, norm_R_L=norm_R_L, norm_T=norm_T,
                   norm_lambda=norm_lambda)


def build_joint_system(ops, nu, alpha, relative=True, norm_iters=200,
                       seed=0, logger=None):
    """
    Collect the stacked JLAM system
    :param ops: OperatorSet with norms
    :param nu: proportionality constant between mu_E and n_e
    :param alpha: regularization weight, relative to ||T|| / ||D_m R||
     unless relative is False
    :return: JointSystem
    """
    if not alpha > 0:
        raise ConfigurationError('alpha must be positive, got {0}'.format(
            alpha))
    raw_alpha = alpha
    if relative:
        norm_lambda = ops.norm_lambda
        if norm_lambda is None:
            lambda_op = SparseLinearOperator(
                ops.D_m.matrix.dot(ops.R.matrix), name='D_m R')
            norm_lambda = spectral_norm(lambda_op, norm_iters, 1e-4, seed,
                                        strict=False, logger=logger)
        raw_alpha = alpha * ops.norm_T / norm_lambda
    return JointSystem(ops.R_L, ops.T, ops.R, ops.D_m, ops.w, nu, raw_alpha,
                       ops.m, alpha if relative else None)


def simulate_data(p, ops):
    """
    Noiseless data of a phantom pair
    :return: (b1, b2) = (R_L mu_E, T n_e)
    """
    if p.n_e.size != ops.T.n_cols or p.mu_E.size != ops.R_L.n_cols:
        raise DimensionMismatchError(
            'Phantom grid {0} does not match the operators'.format(p.grid))
    return ops.R_L.apply(p.mu_E), ops.T.apply(p.n_e)


def add_noise(b, eta, seed):
    """
    Gaussian noise of relative level eta: b + eta ||b|| v / sqrt(len(b))
    :param b: data vector
    :param eta: noise level, nonnegative
    :param seed: generator seed
    :return: noisy copy of b
    """
    if eta < 0:
        raise ConfigurationError('Noise level must be >= 0, got {0}'.format(
            eta))
    b = np.asarray(b, dtype=float)
    if eta == 0:
        return b.copy()
    v = np.random.default_rng(seed).standard_normal(b.size)
    return b + eta * np.linalg.norm(b) * v / math.sqrt(b.size)


def make_noisy_data(p, ops, eta, seed):
    """
    Simulate normalized data of a phantom and add noise to the stacked
    vector (b1, b2)
    :return: NoisyData with the normalization scale
    """
    scale = float(np.max(p.n_e)) or 1.0
    b1, b2 = simulate_data(p.scaled(1.0 / scale), ops)
    noisy = add_noise(np.concatenate([b1, b2]), eta, seed)
    return NoisyData(noisy[:b1.size], noisy[b1.size:], eta, seed, scale)


def _as_matrix(A):
    return A.matrix if isinstance(A, SparseLinearOperator) else A


@dataclass(eq=False)
class CglsResult:
    x: np.ndarray
    converged: bool
    iterations: int
    restarts: int
    trace: list


def cgls_nonneg(A, b, max_iters=200, tol=1e-6, max_restarts=10, logger=None):
    """
    Nonnegative least squares by restarted CGLS. Each restart runs CGLS on
    the free variables, projects onto x >= 0 with a backtracking safeguard
    and recomputes the free set.
    :param A: scipy sparse matrix, dense array or SparseLinearOperator
    :param b: right hand side
    :param max_iters: CGLS iterations per restart
    :param tol: relative tolerance on the projected gradient and on the
     objective decrease between restarts
    :param max_restarts: restart budget
    :return: CglsResult
    """
    logger = logger or LOG
    A = _as_matrix(A)
    b = np.asarray(b, dtype=float)
    if A.shape[0] != b.size:
        raise DimensionMismatchError(
            'System has {0} rows, right hand side {1}'.format(
                A.shape[0], b.size))

    def residual_of(x):
        r = b - A.dot(x)
        return r, float(r.dot(r))

    x = np.zeros(A.shape[1])
    r, objective = residual_of(x)
    trace = [(0, objective, math.sqrt(objective))]
    scale = np.linalg.norm(A.T.dot(b)) or 1.0
    iterations, converged, restart = 0, False, 0

    for restart in range(1, max_restarts + 1):
        gradient = -A.T.dot(r)
        free = (x > 0) | (gradient < 0)
        if np.linalg.norm(np.where(free, gradient, 0.0)) <= tol * scale:
            converged = True
            break

        y, res = x.copy(), r.copy()
        s = A.T.dot(res) * free
        p, gamma = s.copy(), s.dot(s)
        for _ in range(max_iters):
            q = A.dot(p)
            qq = q.dot(q)
            if qq == 0.0 or gamma == 0.0:
                break
            step = gamma / qq
            y += step * p
            res -= step * q
            s = A.T.dot(res) * free
            gamma, gamma_old = s.dot(s), gamma
            iterations += 1
            if math.sqrt(gamma) <= tol * scale:
                break
            p = s + (gamma / gamma_old) * p

        candidate = np.maximum(y, 0.0)
        candidate_r, candidate_objective = residual_of(candidate)
        t = 1.0
        while candidate_objective > objective and t > 1e-12:
            t *= 0.5
            candidate = np.maximum(x + t * (y - x), 0.0)
            candidate_r, candidate_objective = residual_of(candidate)
        if candidate_objective > objective:
            candidate, candidate_r, candidate_objective = x, r, objective

        decrease = (objective - candidate_objective) / max(objective, 1e-300)
        x, r, objective = candidate, candidate_r, candidate_objective
        trace.append((iterations, objective, math.sqrt(objective)))
        logger.debug('CGLS restart {0}: objective {1}'.format(
            restart, objective))
        if decrease <= tol:
            converged = True
            break

    if not converged:
        logger.warning('Nonnegative CGLS stopped after {0} restarts with '
                       'objective {1}'.format(restart, objective))
    return CglsResult(x, converged, iterations, restart, trace)


def _reconstruction(grid, mu_E, n_e, name):
    return PhantomPair(grid, n_e.reshape(grid.shape),
                       mu_E.reshape(grid.shape),
                       np.zeros(grid.shape, dtype=np.int32), (), name)


def reconstruct_jlam(sys, data, grid, max_iters=200, tol=1e-6,
                     max_restarts=10, logger=None):
    """
    Solve the stacked system
        [w R_L, 0; 0, T; alpha D R, -alpha nu D R] (mu, n) = (w b1, b2, 0)
    under nonnegativity
    :return: SolverResult
    """
    logger = logger or LOG
    lam = sys.alpha * sys.D_m.matrix.dot(sys.R.matrix)
    stacked = sp.bmat([[sys.w * sys.R_L.matrix, None],
                       [None, sys.T.matrix],
                       [lam, -sys.nu * lam]], format='csr')
    rhs = np.concatenate([sys.w * data.b1, data.b2,
                          np.zeros(lam.shape[0])])
    logger.debug('Attempting to solve JLAM system of shape {0} with '
                 'alpha={1}'.format(stacked.shape, sys.alpha))
    solved = cgls_nonneg(stacked, rhs, max_iters, tol, max_restarts, logger)
    n_pixels = grid.size
    mu_E = solved.x[:n_pixels] * data.scale
    n_e = solved.x[n_pixels:] * data.scale
    return SolverResult(_reconstruction(grid, mu_E, n_e, 'jlam'), 'jlam',
                        solved.converged, solved.iterations,
                        sys.alpha_relative or sys.alpha, solved.trace,
                        solved.trace[-1][1],
                        {'restarts': solved.restarts, 'w': sys.w,
                         'nu': sys.nu, 'alpha_raw': sys.alpha})


def gradient(f, grid):
    """
    Forward differences scaled by the pixel size, zero on the last
    column/row
    :return: (d/dx1, d/dx2) arrays shaped like f
    """
    g1 = np.zeros_like(f)
    g2 = np.zeros_like(f)
    g1[:, :-1] = np.diff(f, axis=1) / grid.dx1
    g2[:-1, :] = np.diff(f, axis=0) / grid.dx2
    return g1, g2


def gradient_adjoint(g1, g2, grid):
    out = np.zeros_like(g1)
    out[:, :-1] -= g1[:, :-1] / grid.dx1
    out[:, 1:] += g1[:, :-1] / grid.dx1
    out[:-1, :] -= g2[:-1, :] / grid.dx2
    out[1:, :] += g2[:-1, :] / grid.dx2
    return out


def huber_tv(f, grid, delta=DEFAULT_HUBER_DELTA):
    """
    Huber-smoothed total variation and its gradient
    :return: (value, gradient)
    """
    g1, g2 = gradient(f, grid)
    magnitude = np.hypot(g1, g2)
    small = magnitude <= delta
    value = np.where(small, magnitude ** 2 / (2 * delta),
                     magnitude - delta / 2).sum() * grid.pixel_area
    weight = np.where(small, 1.0 / delta, 1.0 / np.maximum(magnitude, delta))
    return value, grid.pixel_area * gradient_adjoint(weight * g1,
                                                     weight * g2, grid)


def jtv_penalty(mu, n, grid, beta=DEFAULT_BETA):
    """
    Smoothed joint total variation
        sum sqrt(|grad mu|^2 + |grad n|^2 + beta^2) * pixel area
    :return: (value, gradient wrt mu, gradient wrt n)
    """
    a1, a2 = gradient(mu, grid)
    b1, b2 = gradient(n, grid)
    norm = np.sqrt(a1 ** 2 + a2 ** 2 + b1 ** 2 + b2 ** 2 + beta ** 2)
    area = grid.pixel_area
    value = norm.sum() * area
    with np.errstate(divide='ignore', invalid='ignore'):
        inv = np.where(norm > 0, 1.0 / norm, 0.0)
    return (value,
            area * gradient_adjoint(a1 * inv, a2 * inv, grid),
            area * gradient_adjoint(b1 * inv, b2 * inv, grid))


def lpls_integrand(a, b, beta=DEFAULT_BETA):
    """
    Pointwise parallel level set integrand for gradient fields a and b of
    shape (..., 2)
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    norm_a = np.sqrt(np.sum(a * a, axis=-1) + beta ** 2)
    norm_b = np.sqrt(np.sum(b * b, axis=-1) + beta ** 2)
    inner = np.sum(a * b, axis=-1)
    return norm_a * norm_b - np.sqrt(inner ** 2 + beta ** 4)


def lpls_penalty(mu, n, grid, beta=DEFAULT_BETA):
    """
    Smoothed linear parallel level sets penalty
    :return: (value, gradient wrt mu, gradient wrt n)
    """
    a1, a2 = gradient(mu, grid)
    b1, b2 = gradient(n, grid)
    norm_a = np.sqrt(a1 ** 2 + a2 ** 2 + beta ** 2)
    norm_b = np.sqrt(b1 ** 2 + b2 ** 2 + beta ** 2)
    inner = a1 * b1 + a2 * b2
    coupling = np.sqrt(inner ** 2 + beta ** 4)
    area = grid.pixel_area
    value = (norm_a * norm_b - coupling).sum() * area
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(coupling > 0, inner / coupling, 0.0)
        over_a = np.where(norm_a > 0, norm_b / norm_a, 0.0)
        over_b = np.where(norm_b > 0, norm_a / norm_b, 0.0)
    grad_mu = gradient_adjoint(over_a * a1 - ratio * b1,
                               over_a * a2 - ratio * b2, grid)
    grad_n = gradient_adjoint(over_b * b1 - ratio * a1,
                              over_b * b2 - ratio * a2, grid)
    return value, area * grad_mu, area * grad_n


def projected_gradient(fun, x0, step, max_iters=2000, tol=1e-7,
                       logger=None):
    """
    Projected gradient descent onto x >= 0 with backtracking on the
    sufficient decrease condition, so the objective never increases
    :param fun: callable x -> (objective, gradient, data residual norm)
    :param x0: starting point
    :param step: initial step size
    :return: (x, converged, iterations, trace)
    """
    logger = logger or LOG
    x = np.maximum(np.asarray(x0, dtype=float), 0.0)
    objective, grad, residual = fun(x)
    trace = [(0, objective, residual)]
    for iteration in range(1, max_iters + 1):
        while True:
            candidate = np.maximum(x - step * grad, 0.0)
            delta = candidate - x
            new_objective, new_grad, new_residual = fun(candidate)
            bound = objective + grad.ravel().dot(delta.ravel()) + \
                delta.ravel().dot(delta.ravel()) / (2 * step)
            if new_objective <= bound or step < MIN_STEP:
                break
            step *= 0.5
        if not np.isfinite(new_objective) or step < MIN_STEP:
            logger.warning('Projected gradient broke down at iteration '
                           '{0} (step {1})'.format(iteration, step))
            return x, False, iteration, trace
        if new_objective > objective:
            # Only reachable through rounding at a stationary point.
            trace.append((iteration, objective, residual))
            return x, True, iteration, trace
        change = (objective - new_objective) / max(abs(objective), 1e-300)
        x, objective, grad, residual = \
            candidate, new_objective, new_grad, new_residual
        trace.append((iteration, objective, residual))
        if change < tol:
            return x, True, iteration, trace
        step *= 1.5
    return x, True, max_iters, trace


def _data_term(A, b, x, weight=1.0):
    residual = A.apply(x) - b
    return (weight ** 2 * residual.dot(residual),
            2 * weight ** 2 * A.apply_adjoint(residual))


def reconstruct_tv_separate(data, ops, alpha, grid, delta=DEFAULT_HUBER_DELTA,
                            max_iters=2000, tol=1e-7, logger=None):
    """
    Two independent Huber-TV reconstructions
    :param alpha: weight or (alpha_mu, alpha_n) pair, each relative to the
     squared norm of its forward operator
    :return: SolverResult
    """
    logger = logger or LOG
    alpha_mu, alpha_n = alpha if isinstance(alpha, (tuple, list)) \
        else (alpha, alpha)
    shape = grid.shape
    results = []
    for A, b, weight, op_norm in ((ops.R_L, data.b1, alpha_mu, ops.norm_R_L),
                                  (ops.T, data.b2, alpha_n, ops.norm_T)):
        raw = weight * op_norm ** 2

        def fun(x, A=A, b=b, raw=raw):
            misfit, misfit_grad = _data_term(A, b, x)
            penalty, penalty_grad = huber_tv(x.reshape(shape), grid, delta)
            return (misfit + raw * penalty,
                    misfit_grad + raw * penalty_grad.ravel(),
                    math.sqrt(misfit))

        step = 1.0 / (2 * op_norm ** 2)
        logger.debug('Attempting TV reconstruction for {0} with '
                     'alpha={1}'.format(A, weight))
        results.append(projected_gradient(fun, np.zeros(grid.size), step,
                                          max_iters, tol, logger))
    (mu_E, mu_ok, mu_iters, mu_trace), (n_e, n_ok, n_iters, n_trace) = results
    trace = [(i, f_mu + f_n, math.hypot(r_mu, r_n))
             for (i, f_mu, r_mu), (_, f_n, r_n)
             in _align_traces(mu_trace, n_trace)]
    return SolverResult(
        _reconstruction(grid, mu_E * data.scale, n_e * data.scale, 'tv'),
        'tv', mu_ok and n_ok, max(mu_iters, n_iters), (alpha_mu, alpha_n),
        trace, trace[-1][1])


def _align_traces(first, second):
    length = max(len(first), len(second))
    first = first + [first[-1]] * (length - len(first))
    second = second + [second[-1]] * (length - len(second))
    return [((i, f1, r1), (i, f2, r2))
            for i, ((_, f1, r1), (_, f2, r2))
            in enumerate(zip(first, second))]


def _joint_objective(data, ops, grid, penalty, raw_alpha, beta, w):
    n_pixels = grid.size
    shape = grid.shape

    def fun(x):
        mu, n = x[:n_pixels], x[n_pixels:]
        misfit_mu, grad_mu = _data_term(ops.R_L, data.b1, mu, w)
        misfit_n, grad_n = _data_term(ops.T, data.b2, n)
        value, pen_mu, pen_n = penalty(mu.reshape(shape), n.reshape(shape),
                                       grid, beta)
        return (misfit_mu + misfit_n + raw_alpha * value,
                np.concatenate([grad_mu + raw_alpha * pen_mu.ravel(),
                                grad_n + raw_alpha * pen_n.ravel()]),
                math.sqrt(misfit_mu + misfit_n))
    return fun


def _reconstruct_joint(method, penalty, data, ops, alpha, beta, grid,
                       max_iters, tol, restarts, seed, logger):
    logger = logger or LOG
    w = ops.w
    raw_alpha = alpha * ops.norm_T ** 2
    fun = _joint_objective(data, ops, grid, penalty, raw_alpha, beta, w)
    step = 1.0 / (2 * ops.norm_T ** 2)
    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(max(1, restarts)):
        start = np.zeros(2 * grid.size) if attempt == 0 \
            else rng.uniform(0.0, 0.1, 2 * grid.size)
        logger.debug('Attempting {0} reconstruction (start {1}) with '
                     'alpha={2} beta={3}'.format(method, attempt, alpha,
                                                 beta))
        x, ok, iterations, trace = projected_gradient(
            fun, start, step, max_iters, tol, logger)
        if best is None or trace[-1][1] < best[3][-1][1]:
            best = (x, ok, iterations, trace)
    x, ok, iterations, trace = best
    n_pixels = grid.size
    return SolverResult(
        _reconstruction(grid, x[:n_pixels] * data.scale,
                        x[n_pixels:] * data.scale, method),
        method, ok, iterations, alpha, trace, trace[-1][1],
        {'beta': beta, 'w': w, 'alpha_raw': raw_alpha})


def reconstruct_jtv(data, ops, alpha, grid, beta=DEFAULT_BETA,
                    max_iters=2000, tol=1e-7, logger=None):
    """
    Joint total variation reconstruction; alpha is relative to ||T||^2
    :return: SolverResult
    """
    return _reconstruct_joint('jtv', jtv_penalty, data, ops, alpha, beta,
                              grid, max_iters, tol, 1, 0, logger)


def reconstruct_lpls(data, ops, alpha, grid, beta=DEFAULT_BETA,
                     max_iters=2000, tol=1e-7, restarts=1, seed=0,
                     logger=None):
    """
    Linear parallel level sets reconstruction. The objective is not convex,
    extra restarts begin from seeded random images and the best final
    objective wins.
    :return: SolverResult
    """
    return _reconstruct_joint('lpls', lpls_penalty, data, ops, alpha, beta,
                              grid, max_iters, tol, restarts, seed, logger)


def alpha_ladder(alpha_min=1e-4, decades=4, per_decade=10):
    count = decades * per_decade + 1
    return list(alpha_min * 10.0 ** (np.arange(count) / float(per_decade)))


def select_alpha(solve, truth, ladder, per_modality=False, mapper=map):
    """
    Grid search of the regularization weight against the ground truth
    :param solve: callable alpha -> SolverResult
    :param truth: PhantomPair
    :param ladder: candidate weights
    :param per_modality: choose separate weights for mu_E and n_e, for
     methods whose two problems decouple
    :param mapper: map-like callable used to evaluate the ladder
    :return: (alpha, SolverResult, list of (alpha, eps_mu, eps_ne))
    """
    results = list(mapper(solve, ladder))
    scores = [(alpha,
               rel_error(truth.mu_E, result.pair.mu_E),
               rel_error(truth.n_e, result.pair.n_e))
              for alpha, result in zip(ladder, results)]
    if not per_modality:
        best = min(range(len(ladder)),
                   key=lambda i: scores[i][1] + scores[i][2])
        return ladder[best], results[best], scores
    best_mu = min(range(len(ladder)), key=lambda i: scores[i][1])
    best_n = min(range(len(ladder)), key=lambda i: scores[i][2])
    mu_result, n_result = results[best_mu], results[best_n]
    pair = replace(mu_result.pair, n_e=n_result.pair.n_e)
    combined = replace(mu_result, pair=pair,
                       converged=mu_result.converged and n_result.converged,
                       alpha=(ladder[best_mu], ladder[best_n]))
    return (ladder[best_mu], ladder[best_n]), combined, scores


class Reconstruction(TomographyResource):
    resource_type = 'reconstruction'

    def create(self, data, ops, alpha, nu=None):
        """
        Run the configured method on a data set
        :param data: NoisyData
        :param ops: OperatorSet with norms
        :param alpha: regularization weight for this run
        :param nu: proportionality constant, needed by JLAM
        :return: SolverResult
        """
        method = self.config.get('method')
        if method not in METHODS:
            raise ConfigurationError(
                'Unknown method {0!r}, expected one of {1}'.format(
                    method, METHODS))
        grid = self.geometry.image
        config = self.config
        if method == 'jlam':
            if nu is None:
                raise ConfigurationError('JLAM needs the constant nu')
            system = build_joint_system(ops, nu, alpha, logger=self.logger)
            return reconstruct_jlam(
                system, data, grid, config.get('cgls_iters', 200),
                config.get('cgls_tol', 1e-6),
                config.get('cgls_restarts', 10), self.logger)
        smooth = dict(max_iters=config.get('smooth_iters', 2000),
                      tol=config.get('smooth_tol', 1e-7), logger=self.logger)
        if method == 'tv':
            return reconstruct_tv_separate(
                data, ops, alpha, grid,
                delta=config.get('huber_delta', DEFAULT_HUBER_DELTA),
                **smooth)
        beta = config.get('beta', DEFAULT_BETA)
        if method == 'jtv':
            return reconstruct_jtv(data, ops, alpha, grid, beta, **smooth)
        return reconstruct_lpls(data, ops, alpha, grid, beta,
                                restarts=config.get('lpls_restarts', 1),
                                seed=config.get('seed', 0), **smooth)

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-example SGD loop over CSR rows.

Same contract and statement order as ``_sgd_py.run_sgd``.
"""

import numpy as np

from libc.math cimport exp, log1p, fabs

cdef enum:
    HINGE = 0
    LOG = 1
    MODIFIED_HUBER = 2
    LOG_SOFT = 3

cdef enum:
    PEN_NONE = 0
    PEN_L2 = 1
    PEN_L1 = 2

cdef double MIN_SCALE = 1e-9


cdef inline double softplus(double x) nogil:
    if x > 0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


cdef inline double sigmoid(double x) nogil:
    cdef double e
    if x >= 0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline double point_loss(int code, double f, double y) nogil:
    cdef double z
    if code == LOG_SOFT:
        return softplus(f) - y * f
    z = y * f
    if code == MODIFIED_HUBER:
        if z >= 1.0:
            return 0.0
        if z >= -1.0:
            return (1.0 - z) * (1.0 - z)
        return -4.0 * z
    if code == HINGE:
        return 1.0 - z if z < 1.0 else 0.0
    return softplus(-z)


cdef inline double point_grad(int code, double f, double y) nogil:
    cdef double z, e
    if code == LOG_SOFT:
        return sigmoid(f) - y
    z = y * f
    if code == MODIFIED_HUBER:
        if z >= 1.0:
            return 0.0
        if z >= -1.0:
            return -2.0 * (1.0 - z) * y
        return -4.0 * y
    if code == HINGE:
        return -y if z < 1.0 else 0.0
    if z > 0:
        e = exp(-z)
        return -e / (1.0 + e) * y
    return -1.0 / (1.0 + exp(z)) * y


cdef double objective(const long long[:] indptr, const long long[:] indices,
                      const double[:] data, const double[:] y, const double[:] sw,
                      double[:] w, double bias, int loss, int penalty,
                      double alpha) nogil:
    cdef Py_ssize_t i, p, j
    cdef double total = 0.0, wsum = 0.0, f, reg = 0.0
    for i in range(y.shape[0]):
        f = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            f += w[indices[p]] * data[p]
        f += bias
        total += sw[i] * point_loss(loss, f, y[i])
        wsum += sw[i]
    total /= wsum
    if penalty == PEN_L2:
        for j in range(w.shape[0]):
            reg += w[j] * w[j]
        total += 0.5 * alpha * reg
    elif penalty == PEN_L1:
        for j in range(w.shape[0]):
            reg += fabs(w[j])
        total += alpha * reg
    return total


def run_sgd(const long long[:] indptr, const long long[:] indices,
            const double[:] data, const double[:] y, const double[:] sw,
            double[:] w, double bias, int loss, int penalty, double alpha,
            double eta0, const long long[:, :] orders):
    cdef Py_ssize_t n_passes = orders.shape[0], n = orders.shape[1]
    cdef Py_ssize_t t, r, i, p, j, dim = w.shape[0]
    cdef double eta, f, g, shrink, step, before
    cdef double scale = 1.0, u = 0.0
    cdef long long k = 0
    cdef double[:] q
    objectives = np.empty(n_passes + 1)
    cdef double[:] obj = objectives
    if penalty == PEN_L1:
        q = np.zeros(dim)
    obj[0] = objective(indptr, indices, data, y, sw, w, bias, loss, penalty, alpha)
    with nogil:
        for t in range(n_passes):
            for r in range(n):
                i = orders[t, r]
                eta = eta0 / (1.0 + alpha * eta0 * k)
                f = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    f += w[indices[p]] * data[p]
                f = scale * f + bias
                g = point_grad(loss, f, y[i]) * sw[i]
                if penalty == PEN_L2:
                    shrink = 1.0 - eta * alpha
                    if shrink <= 0.0:
                        for j in range(dim):
                            w[j] = 0.0
                        scale = 1.0
                    else:
                        scale *= shrink
                        if scale < MIN_SCALE:
                            for j in range(dim):
                                w[j] *= scale
                            scale = 1.0
                if g != 0.0:
                    step = eta * g / scale
                    for p in range(indptr[i], indptr[i + 1]):
                        w[indices[p]] -= step * data[p]
                    bias -= eta * g
                if penalty == PEN_L1:
                    u += eta * alpha
                    for p in range(indptr[i], indptr[i + 1]):
                        j = indices[p]
                        before = w[j]
                        if before > 0.0:
                            w[j] = before - (u + q[j])
                            if w[j] < 0.0:
                                w[j] = 0.0
                        elif before < 0.0:
                            w[j] = before + (u - q[j])
                            if w[j] > 0.0:
                                w[j] = 0.0
                        q[j] += w[j] - before
                k += 1
            if scale != 1.0:
                for j in range(dim):
                    w[j] *= scale
                scale = 1.0
            obj[t + 1] = objective(indptr, indices, data, y, sw, w, bias, loss, penalty, alpha)
    return bias, objectives

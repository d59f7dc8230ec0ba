"""Pure-Python/SciPy fallback for the RK4 propagation kernel.

Same contract as the compiled kernel in ``_rk4.pyx``: advance
y'(t) = L y by ``n_steps`` fixed classical RK4 steps, with L given in CSR
form, optionally re-hermitizing y viewed as a (d, d) row-major matrix after
every step. ``y`` is modified in place and returned.
"""

import numpy as np
from scipy.sparse import csr_matrix

BACKEND_NAME = "python"


def rk4_propagate(data, indices, indptr, y, dt, n_steps, herm_dim):
    n = y.shape[0]
    matrix = csr_matrix((data, indices, indptr), shape=(n, n))
    sixth = dt / 6.0
    half = 0.5 * dt
    for _ in range(n_steps):
        k1 = matrix @ y
        k2 = matrix @ (y + half * k1)
        k3 = matrix @ (y + half * k2)
        k4 = matrix @ (y + dt * k3)
        y += sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if herm_dim > 0:
            m = y[: herm_dim * herm_dim].reshape(herm_dim, herm_dim)
            np.copyto(m, 0.5 * (m + m.conj().T))
    return y

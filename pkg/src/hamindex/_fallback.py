"""Pure NumPy versions of the kernels in ``_core.pyx``."""

import numpy as np


def collocation_propagate(stage_mats, h, a, b):
    stage_mats = np.ascontiguousarray(stage_mats, dtype=float)
    N, s, d, _ = stage_mats.shape
    size = s * d
    # block (i, j) of the stage system is delta_ij I - h a_ij A_i
    blocks = -h * a[None, :, :, None, None] * stage_mats[:, :, None, :, :]
    M = blocks.transpose(0, 1, 3, 2, 4).reshape(N, size, size) + np.eye(size)
    rhs = stage_mats.reshape(N, size, d)
    K = np.linalg.solve(M, rhs).reshape(N, s, d, d)
    steps = np.eye(d) + h * np.einsum("i,kirc->krc", b, K)
    out = np.empty((N + 1, d, d))
    out[0] = np.eye(d)
    for k in range(N):
        out[k + 1] = steps[k] @ out[k]
    return out


def max_symplectic_defect(path):
    path = np.asarray(path, dtype=float)
    d = path.shape[1]
    n = d // 2
    J = np.zeros((d, d))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    prod = np.einsum("klr,lm,kmc->krc", path, J, path)
    return float(np.max(np.abs(prod - J))) if len(path) else 0.0

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from hamindex import _fallback, kernels
from hamindex.flow import _stage_matrices
from hamindex.symplectic import trig_path

try:
    from hamindex import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled extension not built")


def _case(n, steps, seed):
    rng = np.random.default_rng(seed)
    d = 2 * n
    S = [0.5 * (M + M.T) for M in rng.uniform(-1.5, 1.5, size=(3, d, d))]
    B = trig_path(S[0], [S[1]], [S[2]])
    stage, h, a, b = _stage_matrices(B, B.period, steps, 3)
    return stage, h, np.ascontiguousarray(a), np.ascontiguousarray(b)


@needs_core
@pytest.mark.parametrize("n,steps,seed", [(1, 64, 0), (2, 128, 1), (3, 32, 2)])
def test_backends_agree(n, steps, seed):
    args = _case(n, steps, seed)
    fast = _core.collocation_propagate(*args)
    slow = _fallback.collocation_propagate(*args)
    assert fast.shape == slow.shape == (steps + 1, 2 * n, 2 * n)
    assert np.max(np.abs(fast - slow)) <= 1e-12 * max(1.0, np.max(np.abs(slow)))
    # the defect is rounding noise on entries of size |gamma|^2; compare at that scale
    scale = np.max(np.abs(fast)) ** 2
    assert abs(_core.max_symplectic_defect(fast) - _fallback.max_symplectic_defect(fast)) <= 1e-14 * scale


@needs_core
def test_default_backend_is_compiled_when_available():
    if os.environ.get("HAMINDEX_PURE_PYTHON") in ("1", "true", "yes"):
        pytest.skip("fallback forced by environment")
    assert kernels.BACKEND == "cython"


def test_fallback_defect_of_rotation_path():
    ts = np.linspace(0, 1, 5)
    path = np.array([[[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]] for t in ts])
    assert _fallback.max_symplectic_defect(path) <= 1e-15
    path[2] *= 2
    assert _fallback.max_symplectic_defect(path) == pytest.approx(3.0)


def test_pure_python_switch_in_subprocess():
    code = ("import json; from hamindex import kernels, maslov_index, constant_path; import numpy as np; "
            "print(json.dumps([kernels.BACKEND, list(maslov_index(constant_path(0.5 * np.eye(2))))]))")
    env = dict(os.environ, HAMINDEX_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, pair = json.loads(out.stdout)
    assert backend == "python"
    assert pair == [1, 0]

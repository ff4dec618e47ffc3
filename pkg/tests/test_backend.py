import os
import subprocess
import sys

import pytest

from molauth import _backend

SNIPPET = "from molauth import _backend; print(_backend.default_backend())"


def backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop(_backend.ENV_FLAG, None)
    if flag is not None:
        env[_backend.ENV_FLAG] = flag
    return subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True,
                          text=True, check=True).stdout.strip()


@pytest.mark.parametrize("flag", ["1", "yes"])
def test_env_flag_selects_numpy(flag):
    assert backend_in_subprocess(flag) == "numpy"


@pytest.mark.skipif(not _backend.HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("flag", [None, "", "0"])
def test_numba_by_default(flag):
    assert backend_in_subprocess(flag) == "numba"


def test_resolve_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _backend.resolve_backend("cuda")

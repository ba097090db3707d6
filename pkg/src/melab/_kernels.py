"""Select the Jacobi kernel: compiled when importable, pure Python otherwise.

Set ``MEL_BACKEND=python`` to force the fallback.
"""
import os

from melab import _jacobi_py


def available_backends():
    backends = {}
    try:
        from melab import _jacobi
    except ImportError:
        pass
    else:
        backends["cython"] = _jacobi.jacobi_eigh
    backends["python"] = _jacobi_py.jacobi_eigh
    return backends


def _select():
    backends = available_backends()
    if os.environ.get("MEL_BACKEND", "").strip().lower() == "python":
        return "python", backends["python"]
    name = "cython" if "cython" in backends else "python"
    return name, backends[name]


BACKEND, jacobi_eigh = _select()

"""Backend selection for the numerical kernels.

The compiled module is used when it has been built; otherwise, or when the
environment variable ``DYKSTRA_MSF_PURE_PYTHON`` is set to a non-empty value,
the numpy implementations are used.  ``BACKEND`` names the active choice.
"""
import os

from . import _pykernels

try:
    if os.environ.get("DYKSTRA_MSF_PURE_PYTHON"):
        raise ImportError("pure-python backend requested")
    from . import _ckernels as _impl
except ImportError:
    _impl = _pykernels
    BACKEND = "python"
else:
    BACKEND = "cython"

OK = _pykernels.OK
OUTER_FAILED = _pykernels.OUTER_FAILED
INNER_FAILED = _pykernels.INNER_FAILED

pball_project_unit = _impl.pball_project_unit
soc_project = _impl.soc_project
jacobi_eigvalsh = _impl.jacobi_eigvalsh
activeset_solve = _impl.activeset_solve


def available_backends():
    """Return ``{name: module}`` for every importable kernel backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out

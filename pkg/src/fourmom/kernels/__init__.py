"""Per-step kernels of the finite-volume scheme.

The compiled module is used when it was built; otherwise the numpy
implementation is loaded.  Set ``FOURMOM_BACKEND=python`` to force the
fallback.
"""
import importlib
import os

_MODULES = {"cython": "fourmom.kernels._ckernels", "python": "fourmom.kernels._pykernels"}


def get_backend(name=None):
    """Return the kernel module ``name`` (``"cython"`` or ``"python"``).

    ``None`` picks the compiled backend when available.
    """
    if name is None:
        try:
            return importlib.import_module(_MODULES["cython"])
        except ImportError:
            return importlib.import_module(_MODULES["python"])
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(_MODULES)}")
    return importlib.import_module(_MODULES[name])


def available_backends():
    out = []
    for name in _MODULES:
        try:
            get_backend(name)
        except ImportError:
            continue
        out.append(name)
    return out


_forced = os.environ.get("FOURMOM_BACKEND") or None
kernels = get_backend(_forced)
BACKEND = "cython" if kernels.__name__.endswith("_ckernels") else "python"

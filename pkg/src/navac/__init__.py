"""navac: deterministic actor-critic navigation simulations.

Continuous-arena agents built from place-cell inputs, an optional hidden or
recurrent expansion, a ring-shaped action layer and a scalar value unit, all
trained online by error-modulated Hebbian rules. Ships a compiled kernel with
a pure-Python fallback; every run is reproducible from (config, master_seed).
"""

__version__ = "0.1.0"


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    from .backend import default_backend_name
    return default_backend_name()

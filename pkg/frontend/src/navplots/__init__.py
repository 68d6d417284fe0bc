"""Publication-style figures from navac result bundles.

This package reads only the documented bundle file formats (CSV tables,
manifest.json, probe_records.npz, maps/*.json); it never imports the
simulation engine. See the README for the format reference.
"""
__version__ = "0.1.0"

from .reading import Bundle, FormatError
from .figspec import FigureSpec, load_spec

__all__ = ["Bundle", "FormatError", "FigureSpec", "load_spec", "__version__"]

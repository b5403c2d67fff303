"""Wrap an arbitrary text classifier behind the JSON-lines stdin/stdout
prediction protocol so explanation engines can query it as a subprocess.
"""
from .model import LogisticModel, load_model
from .serve import AdapterConfig, main, serve

__all__ = ["AdapterConfig", "LogisticModel", "load_model", "main", "serve"]
__version__ = "0.1.0"

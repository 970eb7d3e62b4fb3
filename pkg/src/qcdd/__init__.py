"""Decision-diagram engine and tools for quantum circuit simulation,
equivalence checking, and interactive visualization."""

from .engine import Engine, EngineConfig, MatrixDD, VectorDD

__all__ = ["Engine", "EngineConfig", "MatrixDD", "VectorDD"]
__version__ = "0.1.0"

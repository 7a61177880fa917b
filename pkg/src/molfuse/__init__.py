"""molfuse: fragment-level multimodal property prediction for OPV molecules."""

__version__ = "0.1.0"

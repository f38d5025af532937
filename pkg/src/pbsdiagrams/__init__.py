"""PBS-diagrams for coherent control of purified quantum channels."""

__version__ = "0.1.0"

"""neolog: detection, filtering and LLM-assisted analysis of emerging
Polish lexemes in a monitored document stream."""

__version__ = "0.1.0"

"""Video retrieval-augmented generation over aligned video caption transcripts."""

__version__ = "0.1.0"

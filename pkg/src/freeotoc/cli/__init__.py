"""Command-line interface (``free-otoc``)."""

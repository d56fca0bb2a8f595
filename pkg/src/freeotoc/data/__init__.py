"""Bundled reference data (YAML) for freeotoc."""

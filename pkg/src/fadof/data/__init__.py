"""Bundled example configurations."""

from importlib import resources


def calibrated_config_path():
    """Filesystem path of the bundled Nd:YVO4 reference configuration."""
    return resources.files(__name__) / "nd_yvo4.toml"

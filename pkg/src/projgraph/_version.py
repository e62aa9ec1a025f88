"""Single source of the package version for runtime reports."""

__version__ = "0.1.0"

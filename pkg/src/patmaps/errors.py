"""Exception hierarchy shared across the package."""


class PatmapsError(Exception):
    """Base class for all toolkit errors."""


class CorpusError(PatmapsError):
    """Fatal record-file problem (malformed header, unreadable input)."""


class GeocodeError(PatmapsError):
    """Fatal geocoding problem (cache write failure, bad configuration)."""


class PajekError(PatmapsError):
    """Malformed Pajek network file; message carries the line number."""


class ConfigError(PatmapsError):
    """Invalid run configuration or inconsistent analysis inputs."""


class BundleError(PatmapsError):
    """Bundle file missing, unreadable, or with an unknown schema tag."""


class PipelineError(PatmapsError):
    """Fatal error while running the end-to-end pipeline."""

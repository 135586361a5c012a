"""Exception and warning types shared across the toolkit."""


class SadkitError(Exception):
    """Base class for all toolkit errors."""


class AudioFormatError(SadkitError):
    """Malformed or unsupported WAV container."""


class ChannelCountError(AudioFormatError):
    """Input is not single-channel."""


class BitDepthError(AudioFormatError):
    """Input is not 16-bit PCM."""


class FramingError(SadkitError):
    """Signal cannot be framed as requested (too short, bad geometry)."""


class NoiseMixError(SadkitError):
    """Noise mixing preconditions violated (length, power, sample rate)."""


class FitError(SadkitError):
    """Model estimation failed (degenerate data, EM collapse, non-finite values)."""


class ScoringError(SadkitError):
    """Trial scoring or metric computation is impossible on the given inputs."""


class ManifestError(SadkitError):
    """Manifest or experiment configuration is invalid."""


class ArtifactMismatchError(SadkitError):
    """A pipeline input was produced under a different configuration hash."""


class HeadroomWarning(UserWarning):
    """Samples exceed [-1, 1] after processing."""


class DegenerateModelWarning(UserWarning):
    """A fitted model is degenerate but still usable."""


class DataSizeWarning(UserWarning):
    """Training data is small relative to the model size."""

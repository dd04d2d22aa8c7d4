"""Exception types shared across the package.

Plain ``ValueError`` is used for ordinary invalid arguments; the classes here
mark conditions callers are expected to branch on (skip a pair, fall back to a
default cutoff, reject a file).
"""


class DegenerateInputError(ValueError):
    """Input is formally valid but carries no usable information
    (all-zero signal cell, zero-variance correlation segment)."""


class NoTroughError(RuntimeError):
    """No spectral trough exists below the heartbeat second harmonic.
    Callers may fall back to a configured default cutoff."""


class FeatureWindowError(IndexError):
    """A feature-context window or correlation segment does not fit inside
    the available data; the affected pair is skipped."""


class DataIntegrityError(ValueError):
    """A file or payload failed structural validation (truncated payload,
    non-monotone beat times, header inconsistency)."""


class EmptyComparisonError(ValueError):
    """Estimate and reference series have no overlapping entries."""

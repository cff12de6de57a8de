"""draftcoach: drafting engine and analytics for best-of-N ban/pick series."""

__version__ = "0.1.0"

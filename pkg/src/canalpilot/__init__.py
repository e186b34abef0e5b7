"""canalpilot: canal-surface task models from a handful of
demonstrations, human-intuitive correction frames along the canal, and
a real-time shared-autonomy session blending autonomous navigation
with 2D operator corrections."""

__version__ = "0.1.0"

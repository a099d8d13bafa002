"""Subtitle-to-signing alignment toolkit.

Thin wrapper over the native module: segmentation decoding, similarity
construction, the episode-level alignment optimization, evaluation metrics,
random parameter search, and the synthetic-episode generator.
"""

from subalign._core import *  # noqa: F401,F403
from subalign._core import __version__  # noqa: F401

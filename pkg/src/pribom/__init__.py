"""Widget-indexed privacy inventory toolkit for Android packages."""

from .model import TOOL_VERSION as __version__  # noqa: F401

"""Version information for manifold-words."""

__version__ = "1.0.0"
__author__ = "The Manifold-Words Team"
__license__ = "MIT"

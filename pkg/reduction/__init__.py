"""
Reduced background spaces.
"""

from .pod import BackgroundSpace, pod, project, projection_error, g_norm

__all__ = ['BackgroundSpace', 'pod', 'project', 'projection_error', 'g_norm']

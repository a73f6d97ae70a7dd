"""
Command-line front end: configuration, pipeline commands and plots.
"""

from .config import ExperimentConfig, parse_config, load_config, load_preset, available_presets
from .commands import cmd_generate, cmd_train, cmd_assimilate, cmd_report, cmd_all, cmd_repeat
from .main import main

__all__ = [
    'ExperimentConfig', 'parse_config', 'load_config', 'load_preset', 'available_presets',
    'cmd_generate', 'cmd_train', 'cmd_assimilate', 'cmd_report', 'cmd_all', 'cmd_repeat',
    'main',
]

"""
Command-line surface: run configs, manifests and the stats / embed /
cluster / train / grid / features / synth subcommands.
"""

from .commands import (
    CommandError,
    cmd_cluster,
    cmd_embed,
    cmd_features,
    cmd_grid,
    cmd_stats,
    cmd_synth,
    cmd_train,
    grid_settings,
    load_run_city,
    read_universe,
)
from .config import RunConfig, flatten, load_config, parse_split, unflatten, write_config
from .main import COMMANDS, main, parse_args
from .manifest import ManifestRecorder, RunManifest, library_versions

__all__ = [
    'COMMANDS',
    'CommandError',
    'ManifestRecorder',
    'RunConfig',
    'RunManifest',
    'cmd_cluster',
    'cmd_embed',
    'cmd_features',
    'cmd_grid',
    'cmd_stats',
    'cmd_synth',
    'cmd_train',
    'flatten',
    'grid_settings',
    'library_versions',
    'load_config',
    'load_run_city',
    'main',
    'parse_args',
    'parse_split',
    'read_universe',
    'unflatten',
    'write_config',
]

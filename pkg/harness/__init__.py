# harness/__init__.py

__version__ = "1.0.0"

from .experiments import (
    HarnessFailure,
    cmd_calibrate,
    cmd_link,
    cmd_pattern,
    cmd_proto_trace,
    cmd_search,
)

__all__ = [
    '__version__',
    'HarnessFailure',
    'cmd_calibrate',
    'cmd_link',
    'cmd_pattern',
    'cmd_proto_trace',
    'cmd_search',
]

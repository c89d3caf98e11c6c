"""Adapter service: real model backends behind the typofix wire protocol.

One process exposes /v1/detect, /v1/recognize, /v1/erase, /v1/plan_layout,
/v1/edit_text, and /v1/augment. Each port is backed by a model selected in
:class:`AdapterConfig`; classical-CV reference models are always loadable,
while heavyweight zoo entries load lazily and refuse startup with a clear
message when their dependencies or weights are absent.
"""

from typofix_adapters.config import AdapterConfig
from typofix_adapters.errors import AdapterError, ModelUnavailableError, StartupError
from typofix_adapters.service import create_app, serve

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "ModelUnavailableError",
    "StartupError",
    "create_app",
    "serve",
    "__version__",
]

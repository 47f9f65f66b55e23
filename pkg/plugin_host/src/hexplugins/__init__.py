"""Plugin host: script-defined external atoms for the hexsolve registry."""

from .dlvhex_api import CONSTANT, PREDICATE, ExtSourceProperties, PluginApiError
from .host import (
    ExportedAtom,
    MissingRegisterError,
    PluginDescriptor,
    ScriptError,
    load_plugin,
)

__all__ = [
    "CONSTANT",
    "ExportedAtom",
    "ExtSourceProperties",
    "MissingRegisterError",
    "PREDICATE",
    "PluginApiError",
    "PluginDescriptor",
    "ScriptError",
    "load_plugin",
]

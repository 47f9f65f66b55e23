"""Load plugin scripts and bridge their external atoms into a registry.

A plugin is a single script file that imports `dlvhex`, defines one
function per external atom, and exports them from register() via
dlvhex.addAtom(name, signature, output_arity, properties). The host
wraps each exported function as an oracle: inputs are marshaled into
handles, the evaluation assignment is exposed through the callback API,
and the output buffer collected after the call becomes the oracle
result. One oracle call is made per (instance, assignment); buffers are
cleared between calls.
"""

from __future__ import annotations

import importlib.util
import sys
import traceback
from dataclasses import dataclass
from typing import Optional

from hexsolve.errors import HexError
from hexsolve.properties import ExtSourceProperties as CoreProperties
from hexsolve.sources import ExternalSource, OracleResult, Registry

from . import dlvhex_api
from .dlvhex_api import CONSTANT, PREDICATE, PluginApiError, Symbol


class ScriptError(HexError):
    """The plugin script failed to load or raised during evaluation."""

    def __init__(self, path: str, message: str, trace: Optional[str] = None):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.trace = trace


class MissingRegisterError(ScriptError):
    def __init__(self, path: str):
        super().__init__(path, "plugin defines no register() entry point")


@dataclass(frozen=True)
class ExportedAtom:
    name: str
    input_signature: tuple
    output_arity: int
    properties: CoreProperties


@dataclass(frozen=True)
class PluginDescriptor:
    path: str
    exported: "tuple[ExportedAtom, ...]"


_plugin_counter = [0]


def _install_dlvhex_module() -> None:
    # scripts do `import dlvhex`; alias the API module under that name
    if sys.modules.get("dlvhex") is not dlvhex_api:
        sys.modules["dlvhex"] = dlvhex_api


def _execute_script(path: str):
    _plugin_counter[0] += 1
    module_name = f"hexsolve_plugin_{_plugin_counter[0]}"
    spec = importlib.util.spec_from_file_location(module_name, path)
    if spec is None or spec.loader is None:
        raise ScriptError(path, "cannot load script")
    module = importlib.util.module_from_spec(spec)
    try:
        spec.loader.exec_module(module)
    except Exception as exc:
        raise ScriptError(path, f"script failed: {exc}", traceback.format_exc()) from exc
    return module


def _wrap_oracle(path: str, fn, signature, output_arity: int, props: CoreProperties):
    def oracle(inputs, view) -> OracleResult:
        with dlvhex_api.host_lock():
            dlvhex_api.push_call(view, output_arity, props.provides_partial_answer)
            try:
                fn(*(Symbol(term) for term in inputs))
            except PluginApiError:
                dlvhex_api.pop_call()
                raise
            except Exception as exc:
                dlvhex_api.pop_call()
                raise ScriptError(
                    path, f"oracle raised: {exc}", traceback.format_exc()
                ) from exc
            call = dlvhex_api.pop_call()
        return OracleResult(
            frozenset(call.outputs), frozenset(call.unknowns - call.outputs)
        )

    return oracle


def load_plugin(path: str, registry: Registry) -> PluginDescriptor:
    """Execute a plugin script and register every atom it exports."""
    _install_dlvhex_module()
    module = _execute_script(path)
    register = getattr(module, "register", None)
    if not callable(register):
        raise MissingRegisterError(path)

    declared: list = []
    with dlvhex_api.host_lock():
        dlvhex_api.push_registration(module, declared)
        try:
            register()
        except PluginApiError:
            raise
        except Exception as exc:
            raise ScriptError(
                path, f"register() failed: {exc}", traceback.format_exc()
            ) from exc
        finally:
            dlvhex_api.pop_registration()

    exported = []
    for name, kinds, output_arity, prop in declared:
        fn = getattr(module, name, None)
        if not callable(fn):
            raise ScriptError(path, f"no callable named '{name}' for addAtom('{name}')")
        props = prop.freeze() if prop is not None else CoreProperties()
        source = ExternalSource(
            name=name,
            input_signature=kinds,
            output_arity=output_arity,
            oracle=_wrap_oracle(path, fn, kinds, output_arity, props),
            properties=props,
        )
        registry.register(source)
        exported.append(ExportedAtom(name, kinds, output_arity, props))
    return PluginDescriptor(path, tuple(exported))

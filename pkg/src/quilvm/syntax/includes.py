"""INCLUDE resolution.

A loader is any callable ``loader(name, parent) -> (origin, text)``. ``parent``
is the origin of the including file (``None`` for the top-level source) and
``origin`` is a stable identifier used for cycle detection and for resolving
nested includes.
"""
from __future__ import annotations

import os
from importlib import resources
from typing import Callable, Mapping, Optional, Sequence

STDGATES_NAME = "stdgates.quil"
EMBEDDED_PREFIX = "<embedded>/"

IncludeLoader = Callable[[str, Optional[str]], "tuple[str, str]"]


class IncludeNotFound(LookupError):
    pass


def embedded_stdgates() -> str:
    return resources.files("quilvm.data").joinpath(STDGATES_NAME).read_text(encoding="utf-8")


def default_loader(name: str, parent: Optional[str] = None) -> tuple[str, str]:
    """Resolves only the embedded standard gate library."""
    if name == STDGATES_NAME:
        return EMBEDDED_PREFIX + name, embedded_stdgates()
    raise IncludeNotFound(name)


def mapping_loader(files: Mapping[str, str], fallback_to_stdgates: bool = True) -> IncludeLoader:
    """Loader over an in-memory ``name -> text`` mapping (handy in tests)."""
    def load(name: str, parent: Optional[str] = None) -> tuple[str, str]:
        if name in files:
            return name, files[name]
        if fallback_to_stdgates:
            return default_loader(name, parent)
        raise IncludeNotFound(name)
    return load


def quilpath_from_env() -> list[str]:
    value = os.environ.get("QUILPATH", "")
    return [p for p in value.split(os.pathsep) if p]


class FileIncludeLoader:
    """Search the including file's directory, then each extra directory, then QUILPATH.

    ``stdgates.quil`` falls back to the embedded copy when no file shadows it.
    """

    def __init__(self, base_dir: str | None = None, search_path: Sequence[str] = (),
                 use_env: bool = True):
        self.base_dir = base_dir or os.getcwd()
        self.search_path = list(search_path)
        if use_env:
            self.search_path += quilpath_from_env()

    def candidates(self, name: str, parent: Optional[str]) -> list[str]:
        if os.path.isabs(name):
            return [name]
        if parent and not parent.startswith(EMBEDDED_PREFIX) and not parent.startswith("<"):
            first = os.path.dirname(parent)
        else:
            first = self.base_dir
        return [os.path.join(d, name) for d in [first, *self.search_path]]

    def __call__(self, name: str, parent: Optional[str] = None) -> tuple[str, str]:
        for path in self.candidates(name, parent):
            if os.path.isfile(path):
                with open(path, encoding="utf-8") as fh:
                    return os.path.realpath(path), fh.read()
        return default_loader(name, parent)

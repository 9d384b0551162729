"""Library of built-in IP modules, registered as Verilog source text.

Sources are parsed lazily and cached; elaboration pulls modules from here
when a design instantiates a name it does not define itself.
"""

from __future__ import annotations

from .ast import ModuleDecl
from .parser import parse


class BuiltinLibrary:
    def __init__(self):
        self._sources: dict[str, str] = {}
        self._cache: dict[str, ModuleDecl] = {}

    def register(self, name: str, verilog: str) -> None:
        self._sources[name] = verilog
        self._cache.pop(name, None)

    def names(self) -> list[str]:
        return sorted(self._sources)

    def __contains__(self, name: str) -> bool:
        return name in self._sources

    def lookup(self, name: str) -> ModuleDecl | None:
        if name not in self._sources:
            return None
        if name not in self._cache:
            ast = parse(self._sources[name])
            mod = ast.find_module(name)
            if mod is None:
                raise ValueError(f"library source for {name!r} does not define that module")
            self._cache[name] = mod
        return self._cache[name]

    def source(self, name: str) -> str:
        return self._sources[name]

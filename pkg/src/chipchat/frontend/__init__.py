from .ast import Ast, ModuleDecl
from .diagnostics import ParseDiagnostic, ParseError, ParseErrorKind, Span
from .parser import parse
from .sloc import UnterminatedComment, count_sloc

__all__ = [
    "Ast", "ModuleDecl", "ParseDiagnostic", "ParseError", "ParseErrorKind",
    "Span", "parse", "count_sloc", "UnterminatedComment",
]

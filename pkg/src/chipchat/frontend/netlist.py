"""Flat netlist produced by elaboration: nets, primitive cells, registers.

Cell opcodes are small ints shared with the simulation kernels. All values
are unsigned and masked to their net width; widths never exceed 64 bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Opcodes. Operand slots a/b/c hold net ids (0 when unused); imm holds a
# small constant (slice offset, concat part width, reduction width).
(
    COPY, NOT, NEG, REDAND, REDOR, REDXOR, LOGICNOT,
    AND, OR, XOR, XNOR, ADD, SUB, MUL, DIV, MOD,
    SHL, SHR, EQ, NE, LT, LE, GT, GE, LAND, LOR,
    CONCAT, SLICE, MUX,
) = range(29)

OP_NAMES = [
    "copy", "not", "neg", "redand", "redor", "redxor", "lognot",
    "and", "or", "xor", "xnor", "add", "sub", "mul", "div", "mod",
    "shl", "shr", "eq", "ne", "lt", "le", "gt", "ge", "land", "lor",
    "concat", "slice", "mux",
]

MASK64 = (1 << 64) - 1


def width_mask(width: int) -> int:
    return MASK64 if width >= 64 else (1 << width) - 1


def fold_op(op: int, a: int, b: int, c: int, imm: int, width: int) -> int:
    """Evaluate one cell on Python ints. The Python kernel and the constant
    folder both use this; the Cython kernel mirrors it instruction for
    instruction."""
    m = width_mask(width)
    if op == COPY:
        return a & m
    if op == NOT:
        return (~a) & m
    if op == NEG:
        return (-a) & m
    if op == REDAND:
        return 1 if a == width_mask(imm) else 0
    if op == REDOR:
        return 1 if a != 0 else 0
    if op == REDXOR:
        return bin(a).count("1") & 1
    if op == LOGICNOT:
        return 1 if a == 0 else 0
    if op == AND:
        return (a & b) & m
    if op == OR:
        return (a | b) & m
    if op == XOR:
        return (a ^ b) & m
    if op == XNOR:
        return (~(a ^ b)) & m
    if op == ADD:
        return (a + b) & m
    if op == SUB:
        return (a - b) & m
    if op == MUL:
        return (a * b) & m
    if op == DIV:
        return m if b == 0 else (a // b) & m
    if op == MOD:
        return m if b == 0 else (a % b) & m
    if op == SHL:
        return 0 if b >= 64 else (a << b) & m
    if op == SHR:
        return 0 if b >= 64 else (a >> b) & m
    if op == EQ:
        return 1 if a == b else 0
    if op == NE:
        return 1 if a != b else 0
    if op == LT:
        return 1 if a < b else 0
    if op == LE:
        return 1 if a <= b else 0
    if op == GT:
        return 1 if a > b else 0
    if op == GE:
        return 1 if a >= b else 0
    if op == LAND:
        return 1 if (a != 0 and b != 0) else 0
    if op == LOR:
        return 1 if (a != 0 or b != 0) else 0
    if op == CONCAT:
        return ((a << imm) | b) & m
    if op == SLICE:
        return (a >> imm) & m
    if op == MUX:
        return (a if c != 0 else b) & m
    raise ValueError(f"unknown opcode {op}")


@dataclass(frozen=True)
class Net:
    id: int
    name: str
    width: int


@dataclass(frozen=True)
class Cell:
    op: int
    out: int
    a: int = 0
    b: int = 0
    c: int = 0
    imm: int = 0
    width: int = 1  # semantic width of the operation (the out net may be wider)

    def describe(self, nets: list[Net]) -> str:
        return f"{nets[self.out].name} = {OP_NAMES[self.op]}({nets[self.a].name}, {nets[self.b].name})"


@dataclass(frozen=True)
class Register:
    q: int  # net holding the current value
    d: int  # net computed combinationally, committed on the clock edge
    width: int
    name: str
    reset_value: int = 0
    is_latch: bool = False  # storage inferred from an incomplete comb block


@dataclass(frozen=True)
class InstanceRecord:
    path: str  # hierarchical instance name, e.g. "vga_inst"
    module: str
    is_builtin: bool


@dataclass
class ElaboratedDesign:
    top: str
    nets: list[Net]
    cells: list[Cell]
    comb_order: list[int]  # cell indices in evaluation order
    registers: list[Register]
    inputs: dict[str, int]
    outputs: dict[str, int]
    name_to_net: dict[str, int]
    const_init: list[tuple[int, int]]  # (net id, value) fixed at build time
    instance_tree: list[InstanceRecord] = field(default_factory=list)

    @property
    def n_nets(self) -> int:
        return len(self.nets)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def builtin_instances(self, module: str | None = None) -> list[InstanceRecord]:
        return [
            r for r in self.instance_tree
            if r.is_builtin and (module is None or r.module == module)
        ]

    def net_id(self, name: str) -> int:
        if name not in self.name_to_net:
            raise KeyError(f"no signal named {name!r} in the design")
        return self.name_to_net[name]

"""Counter machines as a concrete numbering of the partial computable functions.

A program is a list of instructions over registers ``r0, r1, ...``:

* ``INC r``    -- add one to register ``r``, continue with the next instruction;
* ``DJZ r a``  -- if register ``r`` is zero jump to address ``a``, otherwise
  subtract one and continue with the next instruction;
* ``HALT``     -- stop.

Jumping to address ``len(program)`` (or running off the end) also halts.
The input goes into ``r0``, the output is read from ``r0``; every executed
instruction costs one step.

Numbering
---------
``pair`` is the Cantor pairing ``pair(a, b) = (a + b)(a + b + 1)/2 + b``.
Instructions are coded as

* ``INC r``   -> ``3 * r``
* ``DJZ r a`` -> ``3 * pair(r, a) + 1``
* ``HALT``    -> ``2``   (other codes ``3k + 2`` are invalid)

and an instruction list ``[c1, ..., cn]`` as ``seq([]) = 0``,
``seq([c, *rest]) = pair(c, seq(rest)) + 1``, a bijection between the naturals
and finite lists of naturals.  Index 0 is therefore the empty program, which
computes the identity.  Naturals whose list contains an invalid code or an
out-of-range jump decode to ``DIVERGE``, a single self-loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import FormatError

__all__ = [
    "Inc",
    "Djz",
    "Halt",
    "Program",
    "DIVERGE",
    "Trace",
    "pair",
    "unpair",
    "encode_seq",
    "decode_seq",
    "encode",
    "decode",
    "run_program",
    "trace",
    "run_bounded",
    "ce_stage",
    "parse_program",
    "format_program",
]


@dataclass(frozen=True)
class Inc:
    reg: int


@dataclass(frozen=True)
class Djz:
    reg: int
    target: int


@dataclass(frozen=True)
class Halt:
    pass


Instruction = Union[Inc, Djz, Halt]


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instruction, ...] = ()

    def __post_init__(self):
        n = len(self.instructions)
        for ins in self.instructions:
            if isinstance(ins, Djz) and not 0 <= ins.target <= n:
                raise ValueError(f"jump target {ins.target} outside [0, {n}]")
            if isinstance(ins, (Inc, Djz)) and ins.reg < 0:
                raise ValueError("negative register")

    def __len__(self):
        return len(self.instructions)

    @property
    def registers(self) -> int:
        return 1 + max((ins.reg for ins in self.instructions if not isinstance(ins, Halt)), default=0)


DIVERGE = Program((Djz(1, 0),))


@dataclass(frozen=True)
class Trace:
    """Outcome of a step-bounded run, with the number of instructions executed."""

    halted: bool
    value: int | None
    steps: int


# -- pairing and sequence coding -------------------------------------------

def pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    w = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def encode_seq(items: Sequence[int]) -> int:
    code = 0
    for item in reversed(items):
        code = pair(item, code) + 1
    return code


def decode_seq(code: int) -> list[int]:
    items = []
    while code > 0:
        head, code = unpair(code - 1)
        items.append(head)
    return items


def _encode_instruction(ins: Instruction) -> int:
    if isinstance(ins, Inc):
        return 3 * ins.reg
    if isinstance(ins, Djz):
        return 3 * pair(ins.reg, ins.target) + 1
    return 2


def _decode_instruction(code: int) -> Instruction | None:
    kind, arg = code % 3, code // 3
    if kind == 0:
        return Inc(arg)
    if kind == 1:
        return Djz(*unpair(arg))
    return Halt() if arg == 0 else None


def encode(program: Program) -> int:
    return encode_seq([_encode_instruction(ins) for ins in program.instructions])


@lru_cache(maxsize=1 << 16)
def decode(index: int) -> Program:
    if index < 0:
        raise ValueError("program indices are natural numbers")
    codes = decode_seq(index)
    instructions = []
    for code in codes:
        ins = _decode_instruction(code)
        if ins is None or (isinstance(ins, Djz) and ins.target > len(codes)):
            return DIVERGE
        instructions.append(ins)
    return Program(tuple(instructions))


# -- execution --------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _compile(program: Program) -> tuple[tuple[int, int, int], ...]:
    ops = []
    for ins in program.instructions:
        if isinstance(ins, Inc):
            ops.append((0, ins.reg, 0))
        elif isinstance(ins, Djz):
            ops.append((1, ins.reg, ins.target))
        else:
            ops.append((2, 0, 0))
    return tuple(ops)


def run_program(program: Program, x: int, max_steps: int) -> Trace:
    """Run ``program`` on ``x`` for at most ``max_steps`` instructions.

    This is the raw machine; the stage conventions live in :func:`trace`.
    """
    code = _compile(program)
    n = len(code)
    regs = [0] * program.registers
    regs[0] = x
    pc = steps = 0
    while pc < n:
        if steps >= max_steps:
            return Trace(False, None, steps)
        op, r, a = code[pc]
        steps += 1
        if op == 0:
            regs[r] += 1
            pc += 1
        elif op == 1:
            if regs[r]:
                regs[r] -= 1
                pc += 1
            else:
                pc = a
        else:
            break
    return Trace(True, regs[0], steps)


def trace(i: int, x: int, s: int) -> Trace:
    """Step-bounded run of program ``i`` on ``x`` under the stage convention.

    Counts as halted only if the machine stops within ``s`` steps with
    ``x < s`` and output ``y < s``; ``steps`` reports the raw instruction count.
    """
    if s <= 0 or x >= s:
        return Trace(False, None, 0)
    t = run_program(decode(i), x, s)
    if t.halted and t.value >= s:
        return Trace(False, None, t.steps)
    return t


def run_bounded(i: int, x: int, s: int) -> int | None:
    """``phi_{i,s}(x)``: the output if it is defined by stage ``s``, else None."""
    return trace(i, x, s).value


def ce_stage(j: int, s: int) -> frozenset[int]:
    """``W_{j,s}``: the inputs below ``s`` on which program ``j`` halts by stage ``s``."""
    return frozenset(x for x in range(s) if run_bounded(j, x, s) is not None)


# -- text format ------------------------------------------------------------

def parse_program(text: str | Iterable[str]) -> Program:
    lines = text.splitlines() if isinstance(text, str) else list(text)
    instructions: list[Instruction] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *args = line.split()
        try:
            nums = [int(a) for a in args]
        except ValueError:
            raise FormatError(f"line {lineno}: non-numeric operand in {raw!r}") from None
        if any(v < 0 for v in nums):
            raise FormatError(f"line {lineno}: negative operand in {raw!r}")
        op = op.upper()
        if op == "INC" and len(nums) == 1:
            instructions.append(Inc(nums[0]))
        elif op == "DJZ" and len(nums) == 2:
            instructions.append(Djz(nums[0], nums[1]))
        elif op == "HALT" and not nums:
            instructions.append(Halt())
        else:
            raise FormatError(f"line {lineno}: cannot parse {raw!r}")
    try:
        return Program(tuple(instructions))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_program(program: Program) -> str:
    out = []
    for ins in program.instructions:
        if isinstance(ins, Inc):
            out.append(f"INC {ins.reg}")
        elif isinstance(ins, Djz):
            out.append(f"DJZ {ins.reg} {ins.target}")
        else:
            out.append("HALT")
    return "\n".join(out) + ("\n" if out else "")

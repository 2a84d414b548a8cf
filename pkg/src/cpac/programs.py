"""A small library of named programs used by the demos and tests."""

from __future__ import annotations

from .machine import encode, parse_program

IDENTITY = parse_program("")  # halts at once, output = input

LOOP = parse_program(
    """
    INC 1
    DJZ 2 0   # r2 is never touched: unconditional jump back
    """
)

EVENS = parse_program(
    """
    DJZ 0 3   # r0 = 0: halt
    DJZ 0 1   # r0 = 0 here means the input was odd: spin forever
    DJZ 1 0   # back to the top
    """
)

# Halts exactly on {2, 5}: count r0 down, halting or spinning at each value.
FIN2 = parse_program(
    """
    DJZ 0 0   # 0: spin
    DJZ 0 1   # 1: spin
    DJZ 0 7   # 2: halt
    DJZ 0 3   # 3: spin
    DJZ 0 4   # 4: spin
    DJZ 0 7   # 5: halt
    DJZ 1 6   # >= 6: spin
    """
)

MULTIPLES_OF_3 = parse_program(
    """
    DJZ 0 4
    DJZ 0 1
    DJZ 0 2
    DJZ 1 0
    """
)

ALL = parse_program("DJZ 0 1")  # halts on every input

BELOW_4 = parse_program(
    """
    DJZ 0 5
    DJZ 0 5
    DJZ 0 5
    DJZ 0 5
    DJZ 1 4
    """
)

ABOVE_2 = parse_program(
    """
    DJZ 0 0
    DJZ 0 1
    DJZ 0 2
    """
)

I_ID = encode(IDENTITY)
I_LOOP = encode(LOOP)
J_EVENS = encode(EVENS)
J_FIN2 = encode(FIN2)

NAMED = {
    "identity": IDENTITY,
    "loop": LOOP,
    "evens": EVENS,
    "fin2": FIN2,
    "multiples-of-3": MULTIPLES_OF_3,
    "all": ALL,
    "below-4": BELOW_4,
    "above-2": ABOVE_2,
}

"""Text formats for class specs, samples and distributions.

Class spec (``key = value`` lines, ``#`` comments)::

    base = THD | THD_OMEGA | IVL | FIN | INIT      (case-insensitive)
    membership = all | explicit: 1,2,5 | decidable: <program> | enumerable: <program>
    budget = 4096          # cap; or "64..4096" for initial..cap

``<program>`` is a program file (relative to the class file) or a bare
program index.  Samples are ``x<TAB>y`` lines; distributions are
``x<TAB>y<TAB>num/den`` lines.  Any whitespace separates fields.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .classes import All, Base, BudgetPolicy, ClassSpec, Decidable, Enumerable, Explicit
from .errors import FormatError
from .learn import FiniteDistribution, Sample, as_sample
from .machine import encode, parse_program

__all__ = [
    "parse_class_spec",
    "load_class_spec",
    "format_class_spec",
    "parse_sample",
    "load_sample",
    "parse_distribution",
    "load_distribution",
    "load_program_index",
    "parse_int_list",
]


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def parse_int_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise FormatError(f"expected comma-separated naturals, got {text!r}") from None
    if any(v < 0 for v in out):
        raise FormatError("negative values are not naturals")
    return out


def load_program_index(ref: str, base_dir: Path = Path(".")) -> int:
    """Program index from a bare natural or a program file."""
    ref = ref.strip()
    if ref.isdigit():
        return int(ref)
    path = base_dir / ref
    try:
        return encode(parse_program(path.read_text()))
    except OSError as exc:
        raise FormatError(f"cannot read program file {path}: {exc.strerror}") from None


def _budget(value: str) -> BudgetPolicy:
    try:
        if ".." in value:
            lo, hi = value.split("..", 1)
            return BudgetPolicy(int(lo), int(hi))
        cap = int(value)
        return BudgetPolicy(min(64, cap), cap)
    except ValueError as exc:
        raise FormatError(f"bad budget {value!r}: {exc}") from None


def parse_class_spec(text: str, base_dir: Path = Path(".")) -> ClassSpec:
    fields: dict[str, str] = {}
    for n, line in _lines(text):
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or key not in ("base", "membership", "budget"):
            raise FormatError(f"line {n}: expected 'base', 'membership' or 'budget' assignment")
        if key in fields:
            raise FormatError(f"line {n}: duplicate {key!r}")
        fields[key] = value.strip()
    if "base" not in fields:
        raise FormatError("class spec needs a 'base' line")
    try:
        base = Base(fields["base"].upper())
    except ValueError:
        raise FormatError(f"unknown base {fields['base']!r}") from None
    policy = _budget(fields["budget"]) if "budget" in fields else BudgetPolicy()
    kind, _, arg = fields.get("membership", "all").partition(":")
    kind = kind.strip().lower()
    if kind == "all" and not arg.strip():
        membership = All()
    elif kind == "explicit":
        membership = Explicit(parse_int_list(arg))
    elif kind in ("decidable", "enumerable") and arg.strip():
        index = load_program_index(arg, base_dir)
        membership = Decidable(index, policy) if kind == "decidable" else Enumerable(index, policy)
    else:
        raise FormatError(f"bad membership {fields.get('membership')!r}")
    return ClassSpec(base, membership)


def load_class_spec(path: str | Path) -> ClassSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read class spec {path}: {exc.strerror}") from None
    return parse_class_spec(text, path.parent)


def format_class_spec(spec: ClassSpec) -> str:
    m = spec.membership
    lines = [f"base = {spec.base.value}"]
    if isinstance(m, All):
        lines.append("membership = all")
    elif isinstance(m, Explicit):
        lines.append("membership = explicit: " + ",".join(map(str, m.indices)))
    else:
        kind = "decidable" if isinstance(m, Decidable) else "enumerable"
        index = m.decider if isinstance(m, Decidable) else m.enumerator
        lines.append(f"membership = {kind}: {index}")
        lines.append(f"budget = {m.budget.initial}..{m.budget.cap}")
    return "\n".join(lines) + "\n"


def parse_sample(text: str) -> Sample:
    pairs = []
    for n, line in _lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {n}: expected 'x<TAB>y'")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise FormatError(f"line {n}: fields must be integers") from None
    try:
        return as_sample(pairs)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def parse_distribution(text: str) -> FiniteDistribution:
    atoms = []
    for n, line in _lines(text):
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"line {n}: expected 'x<TAB>y<TAB>num/den'")
        try:
            atoms.append((int(parts[0]), int(parts[1]), Fraction(parts[2])))
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"line {n}: bad number") from None
    try:
        return FiniteDistribution(tuple(atoms))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _read(path: str | Path, what: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {what} {path}: {exc.strerror}") from None


def load_sample(path: str | Path) -> Sample:
    return parse_sample(_read(path, "sample"))


def load_distribution(path: str | Path) -> FiniteDistribution:
    return parse_distribution(_read(path, "distribution"))

"""Finite periodic symbol sequences over {-, +}.

The text form is a string of '+' and '-' characters; on input each sign may
carry a repeat count ("-3+" expands to "---+").  Output is always fully
expanded.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput

__all__ = ["SymbolSequence"]


@dataclass(frozen=True)
class SymbolSequence:
    """An ordered word of signs (+1 / -1), read cyclically."""

    symbols: tuple[int, ...]

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise InvalidInput("symbol sequence must have length >= 1")
        if any(s not in (-1, 1) for s in self.symbols):
            raise InvalidInput("symbols must be +1 or -1")

    @classmethod
    def parse(cls, text: str) -> "SymbolSequence":
        """Parse a sign string with optional run-length counts."""
        out: list[int] = []
        i = 0
        if not text:
            raise InvalidInput("empty symbol string")
        while i < len(text):
            ch = text[i]
            if ch not in "+-":
                raise InvalidInput(f"unexpected character {ch!r} in symbol string")
            i += 1
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            count = int(text[i:j]) if j > i else 1
            if count < 1:
                raise InvalidInput("repeat count must be >= 1")
            out.extend([1 if ch == "+" else -1] * count)
            i = j
        return cls(tuple(out))

    @classmethod
    def from_signs(cls, values) -> "SymbolSequence":
        """Sequence of sign(v) for each value; zero entries are rejected."""
        syms = []
        for v in values:
            if v > 0:
                syms.append(1)
            elif v < 0:
                syms.append(-1)
            else:
                raise InvalidInput("cannot take the sign of a zero entry")
        return cls(tuple(syms))

    @property
    def period(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, t: int) -> int:
        return self.symbols[t]

    def at(self, t: int) -> int:
        """Symbol at time t, read periodically."""
        return self.symbols[t % len(self.symbols)]

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.symbols)

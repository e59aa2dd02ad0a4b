"""Session configuration: signature declaration, truncation, tolerances, seed."""

from __future__ import annotations

import json
import os
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .jets import Signature, SignatureError
from .numeric import Tolerances
from .parser import RESERVED

CONFIG_ENV = "JETVAR_CONFIG"

_PARITY = {"even": 0, "odd": 1, "0": 0, "1": 1}
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def parse_fiber_spec(text: str) -> tuple:
    """``x:even,th:odd:2`` -> (("x", 0), ("th", 1), ("th", 1))."""
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise SignatureError(f"bad fiber entry {item!r}; use name:parity[:count]")
        name, par = parts[0], parts[1].lower()
        if par not in _PARITY:
            raise SignatureError(f"bad parity {parts[1]!r} in {item!r}")
        count = int(parts[2]) if len(parts) == 3 else 1
        if count < 1:
            raise SignatureError(f"count must be positive in {item!r}")
        out.extend([(name, _PARITY[par])] * count)
    return tuple(out)


def parse_sig_spec(text: str) -> tuple:
    """``2:1`` -> (2, 1)."""
    try:
        r, s = (int(v) for v in text.split(":"))
    except ValueError:
        raise SignatureError(f"bad signature {text!r}; use r:s") from None
    return r, s


@dataclass(frozen=True)
class SessionConfig:
    r: int = 1
    s: int = 0
    fiber: tuple = (("x", 0),)
    truncation: int = 3
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "fiber", tuple((str(n), int(p)) for n, p in self.fiber))
        self.validate()

    def validate(self) -> None:
        for name, _ in self.fiber:
            if not _NAME.match(name):
                raise SignatureError(f"fiber name {name!r} is not an identifier")
            if name in RESERVED:
                raise SignatureError(f"fiber name {name!r} is reserved")
        if self.truncation < 0:
            raise SignatureError("truncation must be >= 0")
        self.signature()

    def signature(self) -> Signature:
        return Signature(self.r, self.s, self.fiber)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fiber"] = [list(f) for f in self.fiber]
        d["schema"] = 1
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SessionConfig":
        d = dict(d)
        schema = d.pop("schema", 1)
        if schema != 1:
            raise ValueError(f"unsupported config schema {schema}")
        if isinstance(d.get("fiber"), str):
            d["fiber"] = parse_fiber_spec(d["fiber"])
        if "tolerances" in d:
            d["tolerances"] = Tolerances.from_dict(d["tolerances"])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "SessionConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    @classmethod
    def default(cls) -> "SessionConfig":
        path = os.environ.get(CONFIG_ENV)
        return cls.load(path) if path else cls()

"""Runtime configuration for the command-line surface."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class Config:
    prec2: int = 9  # 2-adic precision exponent N
    precu1: int = 24  # u1-window M
    xdeg: int = 17  # formal-variable degree window D
    window: int = 96  # degree bound |t| for line-by-line certification
    fixtures: str | None = None
    use_fixtures: bool = True
    fmt: str = "json"
    seed: int = 0

    def validate(self) -> "Config":
        if self.prec2 < 6:
            raise ValueError("prec2 must be >= 6 for the congruence batteries")
        if self.precu1 < 12:
            raise ValueError("precu1 must be >= 12")
        if self.xdeg < 9:
            raise ValueError("xdeg must be >= 9 (t-series need x-degree 8)")
        if self.precu1 < self.xdeg:
            raise ValueError("precu1 must be >= xdeg to keep the law exact")
        if self.fmt not in ("json", "tsv", "svg"):
            raise ValueError(f"unknown format {self.fmt!r}")
        return self

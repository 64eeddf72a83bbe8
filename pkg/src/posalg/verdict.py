from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check.  Truthy iff affirmative.

    ``status`` is a short lowercase tag ("pass", "holds", "member", ...);
    ``witness`` carries whatever the check found.
    """

    ok: bool
    status: str
    witness: Any = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

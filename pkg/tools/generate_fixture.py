"""Regenerate the packaged quantity-case fixture CSV.

The builder is deterministic; rerunning must reproduce the committed file
byte for byte.
"""

from pathlib import Path

from groupanon.microfile import write_microfile
from groupanon.reference import build_quantity_microfile

if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "src" / "groupanon" / "data" / "military.csv"
    write_microfile(build_quantity_microfile(), out)
    print(f"wrote {out}")

"""Regenerate the golden CLI outputs: python3 tests/make_golden.py"""

import contextlib
import io
from pathlib import Path

from ruledrel.cli import main

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "golden"
COMMANDS = {"eval": "csv", "mesh": "obj", "check": "check.txt"}


def render(command: str, scenario: Path) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main([command, str(scenario)])
    return code, buf.getvalue()


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for path in sorted(SCENARIOS.glob("*.toml")):
        for command, ext in COMMANDS.items():
            code, text = render(command, path)
            assert code == 0, (command, path.name, code)
            (GOLDEN / f"{path.stem}.{ext}").write_bytes(text.encode())
            print(f"{path.stem}.{ext}")

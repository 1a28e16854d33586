from __future__ import annotations

from pathlib import Path


class InputError(ValueError):
    """Malformed or unusable input file; carries the file and line when known."""

    def __init__(self, path: str | Path | None, line: int | None, message: str):
        self.path = None if path is None else str(path)
        self.line = line
        self.message = message
        where = self.path or "<input>"
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}")


class ConfigError(ValueError):
    """A workload configuration that cannot be realised."""

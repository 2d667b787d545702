"""CSV coefficient files: ``# key=value`` header lines, then ``n,a_n`` rows."""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

from ..errors import DataError

HEADER_KEYS = ("label", "level", "weight", "bound")


def rows_digest(coeffs) -> str:
    h = hashlib.sha256()
    for n, c in enumerate(coeffs, start=1):
        h.update(f"{n},{c}\n".encode())
    return h.hexdigest()


def format_coefficients(header: dict, coeffs) -> str:
    """Serialize ``[a(1), ..., a(B)]`` with a header; a ``sha256`` line is added."""
    lines = [f"# {key}={header[key]}" for key in HEADER_KEYS]
    for key, value in header.items():
        if key not in HEADER_KEYS and key != "sha256":
            lines.append(f"# {key}={value}")
    lines.append(f"# sha256={rows_digest(coeffs)}")
    lines.extend(f"{n},{c}" for n, c in enumerate(coeffs, start=1))
    return "\n".join(lines) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_coefficients(text: str, origin: str = "<string>") -> tuple[dict, list[int]]:
    """Strict parse; raises :class:`DataError` on any malformation."""
    if not text.endswith("\n"):
        raise DataError(f"{origin}: file is not newline-terminated (truncated?)")
    header: dict[str, str] = {}
    coeffs: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            raise DataError(f"{origin}:{lineno}: blank line")
        if line.startswith("#"):
            if coeffs:
                raise DataError(f"{origin}:{lineno}: header line after data rows")
            body = line[1:].strip()
            if "=" not in body:
                raise DataError(f"{origin}:{lineno}: malformed header {line!r}")
            key, value = body.split("=", 1)
            header[key.strip()] = value.strip()
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DataError(f"{origin}:{lineno}: expected 'n,a_n', got {line!r}")
        try:
            n, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"{origin}:{lineno}: non-integer field in {line!r}") from None
        if n != len(coeffs) + 1:
            raise DataError(f"{origin}:{lineno}: rows out of order (n={n})")
        coeffs.append(c)
    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise DataError(f"{origin}: missing header keys {missing}")
    try:
        bound = int(header["bound"])
    except ValueError:
        raise DataError(f"{origin}: bad bound {header['bound']!r}") from None
    if bound != len(coeffs):
        raise DataError(f"{origin}: header bound {bound} but {len(coeffs)} rows (truncated?)")
    if "sha256" in header and header["sha256"] != rows_digest(coeffs):
        raise DataError(f"{origin}: sha256 mismatch")
    return header, coeffs


def read_coefficients(path) -> tuple[dict, list[int]]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return parse_coefficients(text, str(path))


def write_table(table, path) -> None:
    header = {
        "label": table.label,
        "level": table.level,
        "weight": table.weight,
        "bound": table.bound,
    }
    atomic_write(Path(path), format_coefficients(header, table.a[1:]))


def read_table(path):
    from .tables import CoeffTable, FixtureSource, FormSpec

    header, coeffs = read_coefficients(path)
    spec = FormSpec(int(header["level"]), int(header["weight"]), header["label"], FixtureSource(str(path)))
    return CoeffTable(spec, (0, *coeffs), eigenform=coeffs[0] == 1)

"""Known q-expansions: shipped fixture files and an opt-in HTTP client.

Nothing in the computational modules calls :func:`fetch_remote`; it runs only
when a user passes ``--online`` (or ``offline=False``).
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import re
from dataclasses import dataclass
from pathlib import Path

from .coeffs import CoeffTable
from .coeffs.cache import atomic_write, format_coefficients, parse_coefficients
from .errors import ConfigError, DataError
from .forms import FIXTURE_DIR

API_URL = "https://www.lmfdb.org/api/mf_newforms/"
API_FIELDS = "label,level,weight,dim,traces"
LABEL_RE = re.compile(r"^(\d+)\.(\d+)\.([a-z]+)\.([a-z]+)$")
MIN_LENGTH = 10


class NetworkError(DataError):
    pass


@dataclass(frozen=True)
class FixtureRecord:
    label: str
    level: int
    weight: int
    coefficients: tuple[int, ...]  # a(1), ..., a(B)
    source: str
    retrieved_at: str

    def __post_init__(self):
        if len(self.coefficients) < MIN_LENGTH:
            raise DataError(f"{self.label}: only {len(self.coefficients)} coefficients (need >= {MIN_LENGTH})")
        if self.coefficients[0] != 1:
            raise DataError(f"{self.label}: a(1) = {self.coefficients[0]}, expected 1")

    @property
    def bound(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.bound:
            raise IndexError(n)
        return self.coefficients[n - 1]

    def to_text(self) -> str:
        header = {
            "label": self.label,
            "level": self.level,
            "weight": self.weight,
            "bound": self.bound,
            "source": self.source,
            "retrieved_at": self.retrieved_at,
        }
        return format_coefficients(header, self.coefficients)


def check_label(label: str) -> tuple[int, int]:
    m = LABEL_RE.match(label)
    if not m:
        raise ConfigError(f"malformed newform label {label!r} (expected e.g. 11.2.a.a)")
    return int(m.group(1)), int(m.group(2))


def cache_dir() -> Path:
    return Path(os.environ.get("SIGNLAB_CACHE_DIR", "fixtures"))


def _record(header: dict, coeffs: list[int], origin: str) -> FixtureRecord:
    try:
        level, weight = int(header["level"]), int(header["weight"])
    except ValueError:
        raise DataError(f"{origin}: non-integer level/weight") from None
    return FixtureRecord(
        header["label"],
        level,
        weight,
        tuple(coeffs),
        header.get("source", origin),
        header.get("retrieved_at", ""),
    )


def load_fixture(path) -> FixtureRecord:
    """Parse and validate a fixture file (checksum verified when present)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read fixture {path}: {exc}") from exc
    header, coeffs = parse_coefficients(text, str(path))
    return _record(header, coeffs, str(path))


def shipped_fixture(label: str) -> FixtureRecord:
    return load_fixture(FIXTURE_DIR / f"{label}.csv")


def parse_remote(payload, label: str, url: str, retrieved_at: str) -> FixtureRecord:
    """Normalize one API response.  Any departure from the pinned shape is an error.

    Pinned shape: ``{"data": [{"label", "level", "weight", "dim", "traces"}]}``
    where ``traces[n-1]`` is the trace of ``a(n)`` and ``dim == 1``.
    """
    if not isinstance(payload, dict) or not isinstance(payload.get("data"), list):
        raise DataError(f"schema drift at {url}: top level must be an object with a 'data' list")
    rows = payload["data"]
    if len(rows) != 1:
        raise DataError(f"schema drift at {url}: expected exactly one record for {label}, got {len(rows)}")
    row = rows[0]
    need = set(API_FIELDS.split(","))
    if not isinstance(row, dict) or set(row) != need:
        got = sorted(row) if isinstance(row, dict) else type(row).__name__
        raise DataError(f"schema drift at {url}: record fields {got}, expected {sorted(need)}")
    if row["label"] != label:
        raise DataError(f"schema drift at {url}: label {row['label']!r} != {label!r}")
    for key in ("level", "weight", "dim"):
        if not isinstance(row[key], int) or isinstance(row[key], bool):
            raise DataError(f"schema drift at {url}: {key} must be an integer")
    if row["dim"] != 1:
        raise DataError(f"{label} has dimension {row['dim']}; only rational newforms are supported")
    traces = row["traces"]
    if not isinstance(traces, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in traces):
        raise DataError(f"schema drift at {url}: traces must be a list of integers")
    level, weight = check_label(label)
    if (row["level"], row["weight"]) != (level, weight):
        raise DataError(f"schema drift at {url}: level/weight disagree with label")
    return FixtureRecord(label, level, weight, tuple(traces), url, retrieved_at)


def fetch_remote(label: str, offline: bool = True, cache: Path | None = None, client=None, timeout: float = 30.0) -> FixtureRecord:
    """The q-expansion of ``label``, from the cache or (when ``offline`` is False) the database API.

    A network failure falls back to a cached copy when there is one.
    """
    check_label(label)
    cache = cache_dir() if cache is None else Path(cache)
    path = cache / f"{label}.csv"
    cached = path if path.exists() else None
    if offline:
        if cached is None:
            raise DataError(
                f"{label} is not cached in {cache} and networking is off; "
                f"rerun with --online, or copy a fixture to {path}"
            )
        return load_fixture(cached)

    import httpx

    params = {"label": label, "_format": "json", "_fields": API_FIELDS}
    own = client is None
    client = httpx.Client(timeout=timeout, follow_redirects=True) if own else client
    try:
        resp = client.get(API_URL, params=params)
        resp.raise_for_status()
        payload = resp.json()
    except (httpx.HTTPError, json.JSONDecodeError, ValueError) as exc:
        if cached is not None:
            return load_fixture(cached)
        raise NetworkError(f"fetching {label} failed ({exc}) and nothing is cached in {cache}") from exc
    finally:
        if own:
            client.close()
    stamp = _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    rec = parse_remote(payload, label, str(resp.url), stamp)
    atomic_write(path, rec.to_text())
    return rec


@dataclass(frozen=True)
class ValidationReport:
    label: str
    compared: int
    mismatches: int
    first_mismatch: int | None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "compared": self.compared,
            "mismatches": self.mismatches,
            "first_mismatch": self.first_mismatch,
            "ok": self.ok,
        }


def compare(a, b, label: str = "") -> ValidationReport:
    """Symmetric coefficientwise comparison of two sequences ``a(1), a(2), ...`` over their overlap."""
    n = min(len(a), len(b))
    bad = [i + 1 for i in range(n) if a[i] != b[i]]
    return ValidationReport(label, n, len(bad), bad[0] if bad else None)


def validate(table: CoeffTable, fixture: FixtureRecord) -> ValidationReport:
    if (table.level, table.weight) != (fixture.level, fixture.weight):
        raise ConfigError(
            f"cannot validate {table.label} (M={table.level}, k={table.weight}) against "
            f"{fixture.label} (M={fixture.level}, k={fixture.weight})"
        )
    return compare(list(table.a[1:]), list(fixture.coefficients), fixture.label)

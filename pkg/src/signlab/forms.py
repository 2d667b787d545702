"""The concrete newforms the experiments run on, keyed by database label."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .coeffs import (
    CoeffTable,
    EllipticCurve,
    EtaProduct,
    FormSpec,
    ec_ap_table,
    eta_table,
    hecke_extend,
    read_table,
)
from .errors import ConfigError, UnknownFormError
from .primes import primes_upto


@dataclass(frozen=True)
class NamedForm:
    spec: FormSpec
    bad_ap: dict = field(default_factory=dict)
    curve: EllipticCurve | None = None
    eta: EtaProduct | None = None
    aliases: tuple[str, ...] = ()

    @property
    def label(self) -> str:
        return self.spec.label


_DELTA = EtaProduct(((1, 24),))
_ETA_11 = EtaProduct(((1, 2), (11, 2)))
_C11 = EllipticCurve(0, -1, 1, -10, -20)
_C37A = EllipticCurve(0, 0, 1, -1, 0)
_C37B = EllipticCurve(0, 1, 1, -23, -50)

FORMS: dict[str, NamedForm] = {
    f.label: f
    for f in (
        NamedForm(FormSpec(1, 12, "1.12.a.a", _DELTA), eta=_DELTA, aliases=("Delta", "delta")),
        NamedForm(
            FormSpec(11, 2, "11.2.a.a", _C11), bad_ap={11: 1}, curve=_C11, eta=_ETA_11, aliases=("11a",)
        ),
        NamedForm(FormSpec(37, 2, "37.2.a.a", _C37A), bad_ap={37: -1}, curve=_C37A, aliases=("37a",)),
        NamedForm(FormSpec(37, 2, "37.2.a.b", _C37B), bad_ap={37: 1}, curve=_C37B, aliases=("37b",)),
    )
}
_ALIASES = {alias: label for label, f in FORMS.items() for alias in f.aliases}

FIXTURE_DIR = Path(__file__).parent / "fixtures"


def get_form(label: str) -> NamedForm:
    label = _ALIASES.get(label, label)
    try:
        return FORMS[label]
    except KeyError:
        known = ", ".join(sorted(FORMS))
        raise UnknownFormError(f"unknown form label {label!r}; known: {known}") from None


_AP_MEMO: dict[str, tuple[int, dict[int, int]]] = {}


def curve_ap(label: str, upto: int, workers: int = 1) -> dict[int, int]:
    """``{p: a_p}`` for good primes ``p <= upto``, memoized per curve."""
    form = get_form(label)
    if form.curve is None:
        raise ConfigError(f"{form.label} has no elliptic curve")
    have, aps = _AP_MEMO.get(form.label, (0, {}))
    if upto > have:
        new = [p for p in primes_upto(upto).tolist() if p > have]
        aps = {**aps, **ec_ap_table(form.curve, new, workers=workers)}
        _AP_MEMO[form.label] = (upto, aps)
        have = upto
    return {p: a for p, a in aps.items() if p <= upto}


@lru_cache(maxsize=32)
def build_table(label: str, B: int, method: str = "auto", workers: int = 1) -> CoeffTable:
    """Coefficient table of a named form through ``q^B``.

    ``method`` is ``"eta"``, ``"curve"`` or ``"auto"`` (point counting when a
    curve is known, else the eta product).
    """
    form = get_form(label)
    if method == "auto":
        method = "curve" if form.curve is not None else "eta"
    if method == "eta":
        if form.eta is None:
            raise ConfigError(f"{form.label} has no eta-product expression")
        return eta_table(form.spec, B, form.eta)
    if method == "curve":
        aps = curve_ap(form.label, B, workers=workers)
        return hecke_extend(form.spec.level, 2, form.bad_ap, aps, B, spec=form.spec)
    raise ConfigError(f"unknown table method {method!r}")


def cached_table(label: str, B: int, cache_dir: Path | None = None) -> CoeffTable:
    """Like :func:`build_table`, but reuse ``<cache_dir>/<label>.csv`` when it covers ``B``."""
    form = get_form(label)
    if cache_dir is not None:
        path = Path(cache_dir) / f"{form.label}.csv"
        if path.exists():
            t = read_table(path)
            if t.bound >= B:
                return truncate(CoeffTable(form.spec, t.a, eigenform=True), B)
    return build_table(form.label, B)


def truncate(t: CoeffTable, B: int) -> CoeffTable:
    if B > t.bound:
        raise ConfigError(f"cannot truncate {t.label} to {B} > {t.bound}")
    if B == t.bound:
        return t
    return CoeffTable(t.spec, t.a[: B + 1], eigenform=t.eigenform, scale=None if t.scale is None else t.scale[: B + 1])

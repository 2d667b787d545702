from .cache import read_table, write_table
from .curves import EllipticCurve, count_points_bsgs, count_points_enumerate, ec_ap, ec_ap_table, ec_bad_ap
from .eta import EtaProduct, eta_expand, euler_power, pentagonal_terms
from .tables import (
    CoeffTable,
    FixtureSource,
    FormSpec,
    LinearCombination,
    character_values,
    deligne_violations,
    eta_table,
    hecke_extend,
    is_fundamental_discriminant,
    kronecker,
    linear_combo,
    multiplicativity_failures,
    oldform_shift,
    prime_power_coefficient,
    table_from_list,
    twist,
)

__all__ = [
    "CoeffTable",
    "EllipticCurve",
    "EtaProduct",
    "FixtureSource",
    "FormSpec",
    "LinearCombination",
    "character_values",
    "count_points_bsgs",
    "count_points_enumerate",
    "deligne_violations",
    "ec_ap",
    "ec_ap_table",
    "ec_bad_ap",
    "eta_expand",
    "eta_table",
    "euler_power",
    "hecke_extend",
    "is_fundamental_discriminant",
    "kronecker",
    "linear_combo",
    "multiplicativity_failures",
    "oldform_shift",
    "pentagonal_terms",
    "prime_power_coefficient",
    "read_table",
    "table_from_list",
    "twist",
    "write_table",
]

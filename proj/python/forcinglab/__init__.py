from ._core import (
    Poset,
    check_laws,
    collapse_count,
    normalize_formula,
    posets_of_size,
    ro_size,
    run,
    separative_posets,
    suite_names,
)

__all__ = [
    "Poset",
    "check_laws",
    "collapse_count",
    "normalize_formula",
    "posets_of_size",
    "ro_size",
    "run",
    "separative_posets",
    "suite_names",
]

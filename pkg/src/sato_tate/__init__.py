"""
Sato-Tate toolkit.

Modules, bottom-up:
    ff_arith    prime-field and quadratic-extension arithmetic
    lpoly       point counts and normalized Frobenius data
    caching     resumable a_p cache files
    groups      finite groups as multiplication tables
    catalog     identity-component catalog
    endo_group  endomorphism data, classification and constructions
    st_group    Sato-Tate group models, Haar sampling and exact moments
    stats       moment statistics and candidate matching
    config      run configuration
    cli         command-line pipelines
"""

__all__ = [
    "caching",
    "catalog",
    "cli",
    "config",
    "endo_group",
    "errors",
    "ff_arith",
    "groups",
    "lpoly",
    "monitoring",
    "st_group",
    "stats",
]

"""Epsilon substitution method for first-order predicate logic."""

from epsub._core import (  # noqa: F401
    Formula,
    System,
    Term,
    __version__,
    ackermann_loop_source,
    alpha_eq,
    degree,
    epsilon_subterms,
    epsilon_translate,
    herbrand_check,
    identity_source,
    is_subordinate,
    is_tautology,
    measure,
    parse_formula,
    parse_system,
    parse_term,
    rank,
    recognize_critical,
    select_maximal,
    solve,
    substitute,
)

"""Substitution tiling semigroups and their self-similar actions."""

__version__ = "0.1.0"

from .field import (  # noqa: F401
    CyclotomicField,
    EmbeddedInterval,
    FieldElement,
    FieldError,
    field_arith,
    field_make,
    field_sign,
)

"""Argument checks shared by the estimator and the command line."""

import re

from .weak_ops import MESHSIZES, check_degrees


class ConfigError(ValueError):
    """Invalid user configuration."""


def validate_degrees(k, s):
    try:
        k, s = int(k), int(s)
        check_degrees(k, s)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return k, s


def validate_gammas(gammas):
    try:
        values = tuple(float(g) for g in gammas)
    except (TypeError, ValueError):
        raise ConfigError(f"gammas must be three numbers, got {gammas!r}") from None
    if len(values) != 3:
        raise ConfigError(f"gammas must be three numbers, got {len(values)}")
    if min(values) < 0:
        raise ConfigError(f"gammas must be non-negative, got {values}")
    return values


def parse_gammas(text):
    """'1,1,1' -> (1.0, 1.0, 1.0)"""
    return validate_gammas([p for p in re.split(r"[,\s]+", str(text).strip()) if p])


def parse_levels(text):
    """Parse '0..4', '1,2,3' or '3' into an ascending tuple of levels."""
    text = str(text).strip()
    m = re.fullmatch(r"(\d+)\s*\.\.\s*(\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        levels = tuple(range(lo, hi + 1))
    else:
        try:
            levels = tuple(int(p) for p in re.split(r"[,\s]+", text) if p)
        except ValueError:
            raise ConfigError(f"cannot parse levels {text!r}; use e.g. '0..4' or '1,2,3'") from None
    if not levels:
        raise ConfigError("levels must be non-empty")
    if any(lv < 0 for lv in levels):
        raise ConfigError("levels must be non-negative")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError(f"levels must be strictly ascending, got {levels}")
    return levels


def validate_meshsize(meshsize):
    if meshsize not in MESHSIZES:
        raise ConfigError(f"meshsize must be one of {MESHSIZES}, got {meshsize!r}")
    return meshsize


def validate_order(order, name="quadrature order"):
    if order is None:
        return None
    try:
        order = int(order)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {order!r}") from None
    if order < 1:
        raise ConfigError(f"{name} must be positive, got {order}")
    return order

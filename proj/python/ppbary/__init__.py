"""Distances and barycenters for finite point patterns."""

from ._ppbary import (
    DomainError,
    UnsupportedConfiguration,
    barycenter,
    cli,
    ospa_distance,
    rtt_distance,
    simulate,
    tt_distance,
)

__all__ = [
    "DomainError",
    "UnsupportedConfiguration",
    "barycenter",
    "cli",
    "ospa_distance",
    "rtt_distance",
    "simulate",
    "tt_distance",
]

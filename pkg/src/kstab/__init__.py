"""Exact evaluation of the limiting K-energy slope of a hypersurface
under diagonal one-parameter subgroups, and a search for weight vectors
on which it turns negative."""

from .envelope import (
    BreakpointSequence,
    Envelope,
    Line,
    breakpoint_sequence,
    build_envelope,
    check_line_genericity,
    penalty_pair_sum,
    penalty_segment_sum,
)
from .polynomial import Support, build_support, parse_polynomial, parse_support_json, validate_support

__version__ = "0.1.0"

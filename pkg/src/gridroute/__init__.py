"""Packet routing on square, triangular and hexagonal grids."""

from .grid import DuplexMode, GridKind, Node, RelativeAddress, distance, relative_address
from .instances import Certificate, Instance, parse_instance, serialize_instance
from .engine import SimConfig, SimResult, Trace, run, validate_trace
from .algorithms import POLICY_IDS, make_policy
from .analysis import bound_report, lb_lk, ub_lk

__version__ = "0.1.0"

__all__ = [
    "Certificate", "DuplexMode", "GridKind", "Instance", "Node", "POLICY_IDS", "RelativeAddress",
    "SimConfig", "SimResult", "Trace", "bound_report", "distance", "lb_lk", "make_policy",
    "parse_instance", "relative_address", "run", "serialize_instance", "ub_lk", "validate_trace",
]

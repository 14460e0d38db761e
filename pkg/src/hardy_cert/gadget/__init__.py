"""Kochen-Specker gadget compiled into a Hardy-type test."""

from .graph import build_gadget15, rotate_copies, verify_gadget_coloring
from .hardy import compile_hardy_test, quantum_verify

__all__ = ["build_gadget15", "rotate_copies", "verify_gadget_coloring",
           "compile_hardy_test", "quantum_verify"]

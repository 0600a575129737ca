"""Thermodynamic formalism on shifts of finite type and measures of full
dimension for self-affine carpets."""

import json

from . import _core
from ._core import ConvergenceFailure, DomainRejection, InvalidInput, mcmullen_dimension, pressure

__all__ = [
    "ConvergenceFailure",
    "DomainRejection",
    "InvalidInput",
    "birkhoff_range",
    "carpet_dim",
    "equilibrium",
    "mcmullen_dimension",
    "pressure",
    "run_cli",
    "solve_beta",
]


def equilibrium(transitions, phi):
    return json.loads(_core.equilibrium_json(transitions, phi))


def birkhoff_range(transitions, psi):
    return json.loads(_core.birkhoff_range_json(transitions, psi))


def solve_beta(transitions, phi, psi, alpha):
    """Level-set solution as a dict, or {"rejection": {...}} outside the
    open Birkhoff range."""
    return json.loads(_core.solve_beta_json(transitions, phi, psi, alpha))


def carpet_dim(carpet, threads=1):
    """carpet is a dict with base, rows and psi, as in the CLI input."""
    return json.loads(_core.carpet_dim_json(json.dumps(carpet), threads))


def run_cli(command, input_path, threads=1):
    code, text = _core.run_cli(command, str(input_path), threads)
    return code, json.loads(text)

"""Assignment-scan kernel: bulk evaluation of propositional bytecode.

Formulas are compiled by their owners into postfix bytecode (pairs of
``op, arg`` bytes) and evaluated here against assignment bitmasks, where
variable ``j`` of ``n`` lives at bit ``n-1-j`` so that ascending masks
enumerate assignments in lexicographic order (False < True).

Two interchangeable implementations exist: a Cython extension compiled at
install time and a pure-Python fallback.  The import below picks the
compiled one when present; ``IMPLEMENTATION`` reports which is active and
``benchmarks/bench_satscan.py`` compares the two.
"""

from __future__ import annotations

OP_VAR = 0
OP_NOT = 1
OP_AND = 2
OP_OR = 3
OP_TRUE = 4
OP_FALSE = 5

MAX_VARS = 30
MAX_STACK = 64

try:
    from . import _satscan as _impl  # type: ignore[attr-defined]
    IMPLEMENTATION = "compiled"
except ImportError:  # extension not built; correctness is unaffected
    from . import _satscan_py as _impl  # type: ignore[no-redef]
    IMPLEMENTATION = "python"


def _check(code: bytes, n_vars: int) -> None:
    if n_vars < 0 or n_vars > MAX_VARS:
        raise ValueError(f"n_vars must be in 0..{MAX_VARS}, got {n_vars}")
    if len(code) % 2 != 0 or not code:
        raise ValueError("bytecode must be a nonempty sequence of op,arg pairs")
    depth = 0
    for i in range(0, len(code), 2):
        op, arg = code[i], code[i + 1]
        if op in (OP_VAR, OP_TRUE, OP_FALSE):
            depth += 1
        elif op == OP_NOT:
            if depth < 1:
                raise ValueError("stack underflow in bytecode")
        elif op in (OP_AND, OP_OR):
            if depth < 2:
                raise ValueError("stack underflow in bytecode")
            depth -= 1
        else:
            raise ValueError(f"unknown opcode {op}")
        if op == OP_VAR and arg >= n_vars:
            raise ValueError(f"variable index {arg} out of range")
        if depth > MAX_STACK:
            raise ValueError("bytecode exceeds evaluation stack")
    if depth != 1:
        raise ValueError("bytecode does not reduce to a single value")


def eval_mask(code: bytes, n_vars: int, mask: int) -> bool:
    """Evaluate the formula under one assignment bitmask."""
    _check(code, n_vars)
    return bool(_impl.eval_mask(code, n_vars, mask))


def scan_all(code: bytes, n_vars: int) -> list[int]:
    """All satisfying masks, ascending (= lexicographic assignments)."""
    _check(code, n_vars)
    return list(_impl.scan_all(code, n_vars))


def find_first(code: bytes, n_vars: int) -> int | None:
    """Smallest satisfying mask, or None when unsatisfiable."""
    _check(code, n_vars)
    res = _impl.find_first(code, n_vars)
    return None if res < 0 else res


def count_all(code: bytes, n_vars: int) -> int:
    """Number of satisfying assignments."""
    _check(code, n_vars)
    return _impl.count_all(code, n_vars)

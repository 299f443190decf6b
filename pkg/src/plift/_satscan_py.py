"""Pure-Python fallback for the assignment-scan kernel.

Same contract as the compiled module; see plift.satscan for the bytecode
format and bit convention.
"""

from __future__ import annotations

_OP_VAR, _OP_NOT, _OP_AND, _OP_OR, _OP_TRUE, _OP_FALSE = range(6)


def _eval(code: bytes, n_vars: int, mask: int) -> int:
    stack = []
    push = stack.append
    pop = stack.pop
    for i in range(0, len(code), 2):
        op = code[i]
        if op == _OP_VAR:
            push((mask >> (n_vars - 1 - code[i + 1])) & 1)
        elif op == _OP_NOT:
            stack[-1] ^= 1
        elif op == _OP_AND:
            v = pop()
            stack[-1] &= v
        elif op == _OP_OR:
            v = pop()
            stack[-1] |= v
        elif op == _OP_TRUE:
            push(1)
        else:
            push(0)
    return stack[0]


def eval_mask(code: bytes, n_vars: int, mask: int) -> int:
    return _eval(code, n_vars, mask)


def scan_all(code: bytes, n_vars: int) -> list[int]:
    return [m for m in range(1 << n_vars) if _eval(code, n_vars, m)]


def find_first(code: bytes, n_vars: int) -> int:
    for m in range(1 << n_vars):
        if _eval(code, n_vars, m):
            return m
    return -1


def count_all(code: bytes, n_vars: int) -> int:
    return sum(_eval(code, n_vars, m) for m in range(1 << n_vars))

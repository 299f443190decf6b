"""plift: family-based verification of annotated model product lines.

Kept import-light on purpose: the bundled solver is spawned as
``python -m plift.smtsolve`` for every check, so importing the package
root must stay cheap.
"""

__version__ = "0.1.0"

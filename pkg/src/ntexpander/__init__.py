"""Explicit Ramanujan Cayley graphs over PGL_2 of finite fields, their square
subgroups, expansion audits, and small Bruhat-Tits building balls."""

__version__ = "0.1.0"

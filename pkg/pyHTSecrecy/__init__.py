"""
``pyHTSecrecy``: distributed hypothesis testing against independence under equivocation
constraints. Region computation (:py:mod:`region`) and finite-blocklength simulation of the
likelihood-encoder scheme (:py:mod:`scheme`).
"""
__version__ = "0.1.0"

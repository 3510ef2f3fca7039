"""
The finite-blocklength coding scheme and its exact and Monte Carlo analysis.
"""
from pyHTSecrecy.scheme.analysis import *
from pyHTSecrecy.scheme.coding import *
from pyHTSecrecy.scheme.construction import *
from pyHTSecrecy.scheme.simulation import *

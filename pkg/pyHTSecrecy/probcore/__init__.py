"""
Finite-alphabet probability primitives, information measures and strong typicality.
"""
from pyHTSecrecy.probcore.channels import *
from pyHTSecrecy.probcore.distributions import *
from pyHTSecrecy.probcore.information import *
from pyHTSecrecy.probcore.typicality import *

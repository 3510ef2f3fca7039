"""
Evaluation and optimization of the rate / exponent / equivocation region.
"""
from pyHTSecrecy.region.evaluation import *
from pyHTSecrecy.region.optimize import *

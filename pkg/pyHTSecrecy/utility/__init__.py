"""
Utility module for ``pyHTSecrecy``.
"""
from pyHTSecrecy.utility.exceptions import *
from pyHTSecrecy.utility.utils import *

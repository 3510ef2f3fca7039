"""
Command line front end: run configurations and the ``ht-secrecy`` commands.
"""
from pyHTSecrecy.cli.commands import *
from pyHTSecrecy.cli.config import *

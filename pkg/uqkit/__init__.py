# -*- coding: utf-8 -*-
'''
uqkit is a toolbox for assessing, visualizing and improving the uncertainty
of regression predictions.

.. include:: ../docs/glossary.md
'''

# load the version (and remove from namespace)
from ._version import v
__version__ = v
del v

# imports
from .calib import *
from .casestudy import *
from .core import *
from .errors import *
from .fileio import *
from .plotdata import *
from .plots import *
from .pnn import *
from .recal import *
from .resources import *
from .scores import *
from .synthetic import *
from .tablestring import *

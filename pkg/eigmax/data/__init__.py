from .constants import *
from .errorhandler import *

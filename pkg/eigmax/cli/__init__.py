from .matrixio import *
from .families import *
from .bench import *
from .app import *

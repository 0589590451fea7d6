from .tridiagonal import *
from .iteration import *
from .general import *
from .bounds import *
from .nexteig import *
from .pipeline import *

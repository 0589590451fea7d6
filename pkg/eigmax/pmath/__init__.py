from .linalg import *
from .oracle import *
from .lanczos import *

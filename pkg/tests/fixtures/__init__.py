from .grids import *
from .states import *

from ._riemgauss import *  # noqa: F401,F403
from ._riemgauss import ValidationError, NumericalError, IoError  # noqa: F401

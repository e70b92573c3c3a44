import warnings
from importlib.util import find_spec

__all__ = ["main"]

if find_spec("click") and find_spec("pandas") and find_spec("matplotlib"):

    from whquant.cli.main import main
else:
    warnings.warn("cli dependencies are not installed - install with whquant[cli]", stacklevel=2)

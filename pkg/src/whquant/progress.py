"""
Optional progress bars for the long loops (kernel rows, parameter sweeps).
"""

from typing import Any, TypeAlias

from tqdm import tqdm


class DummyPbar:
    """pbar that does nothing, used when progress is disabled"""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        pass

    def update(self, n: int = 1) -> None:
        pass

    def close(self) -> None:
        pass

    def set_description(self, *args: Any, **kwargs: Any) -> None:
        pass


PbarLike: TypeAlias = DummyPbar | tqdm


def make_pbar(progress: bool, total: int, desc: str) -> PbarLike:
    if progress:
        return tqdm(total=total, desc=desc, leave=False)
    return DummyPbar()

import numpy as np


def serialize_array(value: np.ndarray) -> list:
    """
    JSON-friendly dump of an array.

    Complex arrays become nested ``[re, im]`` pairs, real arrays plain nested lists.
    """
    if np.iscomplexobj(value):
        return np.stack([value.real, value.imag], axis=-1).tolist()
    return value.tolist()

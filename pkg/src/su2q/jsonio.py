"""JSON encoding helpers: complex numbers travel as ``[re, im]`` pairs."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def encode_complex(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def decode_complex(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1:] != (2,):
        raise ValueError("complex values must be encoded as [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def dump(obj, path) -> None:
    """Write ``obj`` deterministically (sorted keys, fixed separators)."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    if path in (None, "-"):
        print(text)
    else:
        Path(path).write_text(text + "\n")


def load(path):
    with open(path) as fh:
        return json.load(fh)

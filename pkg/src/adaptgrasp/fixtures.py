"""Embedded reference tables shipped with the package, pinned by content hash."""

from __future__ import annotations

import csv
import hashlib
import io
from functools import lru_cache
from importlib import resources

PINNED_SHA256 = {
    "objects.csv": "c5f741c27101ec2991504b034cb48eacfb1e03e221a5bb50ad9b1a89a4b6f784",
    "table2.csv": "218616bce61b6ebf4f2408f475db04976e0a1aa5ca7e3d0a722ff78fce976f82",
    "table3.csv": "3687e20b80bffdc17e594d2dfd31ed2210427e09028f51ab571dec3421a82679",
    "table4.csv": "36cd3855955039920e0293746d8131e52b683fba97442981ab0f47eafb1e7f22",
    "table5.csv": "0d781b5553ec7dc22f14a550e918bbe2fc7f69551569acd679f1a02aa88f8954",
    "mass_estimates.csv": "9551c8a1e1bec459efb8465276c9740283761c120dfa04858f4a02bc2f7a0b8a",
}


class ChecksumMismatch(RuntimeError):
    def __init__(self, name: str, expected: str, actual: str):
        super().__init__(f"{name}: sha256 {actual} does not match pinned {expected}")
        self.name = name
        self.expected = expected
        self.actual = actual


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def read_bytes(name: str) -> bytes:
    return resources.files("adaptgrasp").joinpath("data", name).read_bytes()


def verify(name: str, data: bytes) -> None:
    expected = PINNED_SHA256.get(name)
    actual = sha256_bytes(data)
    if expected and actual != expected:
        raise ChecksumMismatch(name, expected, actual)


@lru_cache(maxsize=None)
def table(name: str) -> tuple[dict, ...]:
    """Rows of an embedded CSV table, after hash verification."""
    data = read_bytes(name)
    verify(name, data)
    return tuple(csv.DictReader(io.StringIO(data.decode("utf-8"))))


def rows_by_name(name: str) -> dict[str, dict]:
    return {r["name"]: r for r in table(name) if r["name"] != "avg_err"}

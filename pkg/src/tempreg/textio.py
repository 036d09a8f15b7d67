"""Plain-text formats for matrices and MDPs.

Matrix format: the first line holds ``n``; then ``n`` lines of ``n``
whitespace-separated decimals. Values are written with 17 significant digits,
which round-trips IEEE doubles exactly.

MDP format::

    n_states = 3
    gamma = 0.9
    reward = 1 0 0
    transition
    3
    0.1 0.9 0
    ...

Blank lines and ``#`` comments are ignored everywhere.
"""

from __future__ import annotations

import os

import numpy as np

from .mdp import TabularMdp

_FMT = "{:.17g}"


def _content_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def format_matrix(m) -> str:
    m = np.asarray(m, dtype=float)
    rows = [" ".join(_FMT.format(x) for x in row) for row in m]
    return "\n".join([str(m.shape[0]), *rows]) + "\n"


def _parse_matrix_lines(lines: list[str]) -> np.ndarray:
    if not lines:
        raise ValueError("empty matrix block")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"matrix block must start with its size, got {lines[0]!r}") from None
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = [[float(tok) for tok in line.split()] for line in lines[1:]]
    if any(len(row) != n for row in rows):
        raise ValueError(f"every matrix row must have {n} entries")
    return np.array(rows, dtype=float).reshape(n, n)


def parse_matrix(text: str) -> np.ndarray:
    return _parse_matrix_lines(_content_lines(text))


def format_mdp(mdp: TabularMdp) -> str:
    head = [
        f"n_states = {mdp.n_states}",
        f"gamma = {_FMT.format(mdp.gamma)}",
        "reward = " + " ".join(_FMT.format(x) for x in mdp.reward),
        "transition",
    ]
    return "\n".join(head) + "\n" + format_matrix(mdp.transition)


def parse_mdp(text: str) -> TabularMdp:
    lines = _content_lines(text)
    fields: dict[str, str] = {}
    for i, line in enumerate(lines):
        if line == "transition":
            matrix = _parse_matrix_lines(lines[i + 1:])
            break
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed line {line!r}")
        fields[key.strip()] = value.strip()
    else:
        raise ValueError("missing 'transition' block")
    missing = {"gamma", "reward"} - fields.keys()
    if missing:
        raise ValueError(f"missing fields: {', '.join(sorted(missing))}")
    reward = [float(tok) for tok in fields["reward"].split()]
    if "n_states" in fields and int(fields["n_states"]) != matrix.shape[0]:
        raise ValueError("n_states disagrees with the transition block")
    return TabularMdp(matrix, reward, float(fields["gamma"]))


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def write_matrix(path: str | os.PathLike, m) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(m))


def read_mdp(path: str | os.PathLike) -> TabularMdp:
    with open(path, encoding="utf-8") as fh:
        return parse_mdp(fh.read())


def write_mdp(path: str | os.PathLike, mdp: TabularMdp) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_mdp(mdp))

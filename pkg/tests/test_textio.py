import numpy as np
import pytest

from tempreg.envs import random_mdp
from tempreg.textio import format_matrix, parse_matrix, parse_mdp, read_mdp, read_matrix, write_mdp, write_matrix


def test_matrix_round_trip_exact(tmp_path):
    m = random_mdp(6, 3).transition
    path = tmp_path / "m.txt"
    write_matrix(path, m)
    back = read_matrix(path)
    np.testing.assert_array_equal(back, m)
    assert path.read_text().splitlines()[0] == "6"


def test_matrix_parse_with_comments():
    text = "# a chain\n2\n0.9 0.1  # first row\n\n0.2 0.8\n"
    np.testing.assert_array_equal(parse_matrix(text), [[0.9, 0.1], [0.2, 0.8]])


@pytest.mark.parametrize(
    "text",
    ["", "x\n1\n", "2\n0.5 0.5\n", "2\n0.5 0.5\n0.5\n"],
)
def test_matrix_parse_errors(text):
    with pytest.raises(ValueError):
        parse_matrix(text)


def test_mdp_round_trip(tmp_path):
    mdp = random_mdp(4, 9, gamma=0.95)
    path = tmp_path / "env.txt"
    write_mdp(path, mdp)
    back = read_mdp(path)
    np.testing.assert_array_equal(back.transition, mdp.transition)
    np.testing.assert_array_equal(back.reward, mdp.reward)
    assert back.gamma == mdp.gamma


def test_mdp_parse_minimal():
    mdp = parse_mdp("gamma = 0.5\nreward = 1 0\ntransition\n2\n0.9 0.1\n0.2 0.8\n")
    assert mdp.n_states == 2
    np.testing.assert_array_equal(mdp.reward, [1.0, 0.0])


@pytest.mark.parametrize(
    "text",
    [
        "gamma = 0.5\nreward = 1 0\n",
        "reward = 1 0\ntransition\n2\n0.9 0.1\n0.2 0.8\n",
        "n_states = 3\ngamma = 0.5\nreward = 1 0\ntransition\n2\n0.9 0.1\n0.2 0.8\n",
        "gamma 0.5\nreward = 1 0\ntransition\n2\n0.9 0.1\n0.2 0.8\n",
    ],
)
def test_mdp_parse_errors(text):
    with pytest.raises(ValueError):
        parse_mdp(text)


def test_format_matrix_precision():
    lines = format_matrix([[1 / 3, 2 / 3], [0.5, 0.5]]).splitlines()
    assert float(lines[1].split()[0]) == 1 / 3

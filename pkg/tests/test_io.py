import numpy as np
import pytest

from geks import SimConfig, simulate
from geks.errors import ConstantOutcome, DimensionMismatch, ParseError
from geks.io import load_dataset, write_dataset

PHENO = "y\tage\ts\n1\t34\t0\n0\t51\t1\n1\t47\t1\n0\t29\t0\n"
GENO = "rs1\trs2\n0\t1\n2\t1\n1\t0\n0\t2\n"


@pytest.fixture
def files(tmp_path):
    def write(pheno=PHENO, geno=GENO):
        p, g = tmp_path / "pheno.tsv", tmp_path / "geno.tsv"
        p.write_text(pheno)
        g.write_text(geno)
        return p, g
    return write


def test_happy_path(files):
    d = load_dataset(*files())
    assert (d.n, d.q, d.p) == (4, 3, 2)
    np.testing.assert_array_equal(d.X[:, 0], 1.0)
    np.testing.assert_array_equal(d.X[:, d.env_col], d.s)
    assert d.covariate_names == ("intercept", "age", "s")
    assert d.snp_names == ("rs1", "rs2")


def test_env_already_a_covariate(files):
    d = load_dataset(*files(pheno="y\ts\tenv\n1\t0\t0\n0\t1\t1\n1\t1\t1\n0\t0\t0\n"))
    assert d.q == 2 and d.env_col == 1


def test_row_mismatch(files):
    with pytest.raises(DimensionMismatch):
        load_dataset(*files(geno="rs1\n0\n1\n2\n"))


def test_non_numeric_cell(files):
    bad = "y\tage\ts\n1\t34\t0\n0\t51\tNA\n1\t47\t1\n0\t29\t0\n"
    with pytest.raises(ParseError, match="row 2, col 3") as info:
        load_dataset(*files(pheno=bad))
    assert (info.value.row, info.value.col) == (2, 3)


def test_ragged_row(files):
    with pytest.raises(ParseError, match="row 3"):
        load_dataset(*files(geno="rs1\trs2\n0\t1\n2\t1\n1\n0\t2\n"))


def test_missing_columns(files):
    with pytest.raises(ParseError, match="'s'"):
        load_dataset(*files(pheno="y\tage\n1\t3\n0\t4\n1\t5\n0\t6\n"))


def test_constant_outcome(files):
    with pytest.raises(ConstantOutcome):
        load_dataset(*files(pheno="y\ts\n1\t0\n1\t1\n1\t1\n1\t0\n"))


def test_non_binary_outcome(files):
    with pytest.raises(ParseError, match="row 2, col 1"):
        load_dataset(*files(pheno="y\ts\n1\t0\n3\t1\n1\t1\n0\t0\n"))


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_dataset(tmp_path / "nope.tsv", tmp_path / "nope2.tsv")


@pytest.mark.parametrize("cfg", [
    SimConfig(n=40, q=2, p=3, seed=1),
    SimConfig(n=40, q=4, p=2, seed=2, env="normal"),
])
def test_round_trip(cfg, tmp_path):
    d = simulate(cfg)
    write_dataset(d, tmp_path / "p.tsv", tmp_path / "g.tsv")
    back = load_dataset(tmp_path / "p.tsv", tmp_path / "g.tsv")
    for field in ("y", "X", "s", "Z"):
        assert np.array_equal(getattr(back, field), getattr(d, field)), field
    assert back.env_col == d.env_col

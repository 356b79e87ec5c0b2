import json
from fractions import Fraction as F

import numpy as np
import pytest

from gptclone import io as mio
from gptclone import zoo
from gptclone.model import AffineMap
from gptclone.quantum import DensityMatrix
from gptclone.stochastic import StochasticMatrix
from gptclone.tensor import TensorSpace, max_tensor

SQUARE = {"kind": "test_space", "tests": [["a0", "a1"], ["b0", "b1"]], "name": "square"}


def load(doc):
    return mio.loads(json.dumps(doc))


class TestParse:
    def test_square_test_space(self):
        s = load(SQUARE)
        assert len(s.vertices) == 4 and not s.is_simplex()

    def test_polytope_v(self):
        doc = {"kind": "polytope_v", "dim": 2, "vertices": [["0", "0"], ["1", "0"], ["0", "1/2"]]}
        s = load(doc)
        assert len(s.vertices) == 3 and s.is_simplex()

    def test_polytope_h(self):
        doc = {"kind": "polytope_h", "dim": 2,
               "inequalities": [{"normal": ["1", "0"], "offset": "0"}, {"normal": ["0", "1"], "offset": "0"},
                                {"normal": ["-1", "-1"], "offset": "-1"}]}
        s = load(doc)
        assert len(s.vertices) == 3

    def test_tensor_space(self):
        t = load({"kind": "tensor_space", "product": "max", "factors": [SQUARE, SQUARE]})
        assert isinstance(t, TensorSpace) and len(t.vertices) == 24

    def test_grid(self):
        M = mio.loads("# two states\n1 1/2\n0 1/2\n")
        assert isinstance(M, StochasticMatrix) and M[0, 1] == F(1, 2)

    def test_density(self):
        rho = load({"kind": "density_matrix", "dim": 2, "entries": [["0.5", "0", "0", "-0.5"], ["0", "0.5", "0.5", "0"]]})
        assert isinstance(rho, DensityMatrix)
        assert np.isclose(rho.matrix[0, 1], -0.5j)

    def test_map_binds_to_source(self):
        s = zoo.delta2()
        unbound = mio.loads(mio.dumps(zoo.kappa_map(s, max_tensor(s, s)), "max_square"))
        assert isinstance(unbound, mio.UnboundMap)
        B = unbound.bind(s)
        assert isinstance(B, AffineMap) and B.matrix == zoo.kappa_map(s, max_tensor(s, s)).matrix


class TestErrors:
    def check(self, doc_or_text, pattern):
        text = doc_or_text if isinstance(doc_or_text, str) else json.dumps(doc_or_text)
        with pytest.raises(mio.ModelFileError, match=pattern):
            mio.loads(text)

    def test_zero_denominator(self):
        self.check({"kind": "polytope_v", "dim": 1, "vertices": [["1/0"]]}, r"vertices\[0\]\[0\]")

    def test_column_sum_named(self):
        self.check({"kind": "stochastic_matrix", "rows": [["9/10", "0"], ["0", "1"]]}, "column 0 sums to 9/10")

    def test_grid_line_number(self):
        self.check("1 0\n0 x\n", "line 2")

    def test_json_syntax_position(self):
        self.check('{"kind": "test_space",\n "tests": [}', "line 2, column")

    def test_missing_field(self):
        self.check({"kind": "polytope_v", "dim": 2}, "missing field 'vertices'")

    def test_unknown_kind(self):
        self.check({"kind": "banana"}, "unknown kind")

    def test_empty_polytope(self):
        self.check({"kind": "polytope_h", "dim": 1,
                    "inequalities": [{"normal": ["1"], "offset": "1"}, {"normal": ["-1"], "offset": "0"}]}, "empty")

    def test_ragged_rows(self):
        self.check({"kind": "stochastic_matrix", "rows": [["1", "0"], ["1"]]}, "different lengths")

    def test_bad_constraint_length(self):
        self.check({"kind": "polytope_h", "dim": 2, "inequalities": [{"normal": ["1"], "offset": "0"}]},
                   r"inequalities\[0\]\.normal")

    def test_map_shape(self):
        unbound = mio.loads(json.dumps({"kind": "affine_map", "target": "self", "matrix": [["1", "0"]]}))
        with pytest.raises(mio.ModelFileError, match="shape"):
            unbound.bind(zoo.delta2())

    def test_map_not_state_preserving(self):
        unbound = mio.loads(json.dumps({"kind": "affine_map", "target": "self", "matrix": [["2", "0"], ["0", "1"]]}))
        with pytest.raises(mio.ModelFileError, match="matrix"):
            unbound.bind(zoo.delta2())

    def test_not_hermitian(self):
        self.check({"kind": "density_matrix", "dim": 2, "entries": [["1", "0", "1", "0"], ["0", "0", "0", "0"]]},
                   "Hermitian")

    def test_missing_file(self, tmp_path):
        with pytest.raises(mio.ModelFileError, match="nope.json"):
            mio.load_model(tmp_path / "nope.json")


class TestRoundTrip:
    @pytest.mark.parametrize("name", sorted(zoo.STATE_SPACES))
    def test_zoo_spaces(self, name):
        s = zoo.get(name)
        text = mio.dumps(s)
        again = mio.loads(text)
        assert again.vertices == s.vertices
        assert mio.dumps(again) == text

    def test_polytope_space(self):
        doc = {"kind": "polytope_v", "dim": 3, "vertices": [["1", "0", "0"], ["1", "1", "0"], ["1", "0", "2/3"]]}
        s = load(doc)
        text = mio.dumps(s)
        assert mio.dumps(mio.loads(text)) == text

    def test_tensor(self):
        t = load({"kind": "tensor_space", "product": "min", "factors": [SQUARE, SQUARE]})
        text = mio.dumps(t)
        assert mio.dumps(mio.loads(text)) == text

    def test_stochastic_grid_and_json(self):
        M = mio.loads("1/3 1\n2/3 0\n")
        text = mio.dumps(M)
        assert mio.loads(text) == M and mio.dumps(mio.loads(text)) == text

    def test_density(self):
        for rho in zoo.qubit_states().values():
            text = mio.dumps(rho)
            again = mio.loads(text)
            assert np.allclose(again.matrix, rho.matrix)
            assert mio.dumps(again) == text

    def test_map(self):
        s = zoo.delta2()
        text = mio.dumps(zoo.swap_broadcast_map(s, max_tensor(s, s)), "max_square")
        assert mio.dumps(mio.loads(text)) == text

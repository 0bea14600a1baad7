"""Bit-exact CSV round-trips and schema validation."""

import numpy as np
import pytest

from exactopinf.diagnostics import DiagnosticsReport
from exactopinf.exact_opinf import generate_ensemble, infer, rank_ensuring_pairs
from exactopinf.fom import SnapshotMatrix, from_dense_operators
from exactopinf.galerkin import AggregatedOperator
from exactopinf.pod import PodBasis, pod_basis
from exactopinf.serialize import (
    SchemaError,
    read_basis,
    read_ensemble,
    read_operator,
    read_snapshots,
    write_basis,
    write_ensemble,
    write_operator,
    write_report_rows,
    write_snapshots,
)
from exactopinf.tensor_poly import MonomialBasis


class TestSnapshots:
    def test_round_trip_bit_exact(self, rng, tmp_path):
        snaps = SnapshotMatrix(
            states=rng.standard_normal((4, 6)),
            times=np.cumsum(rng.random(6)),
            inputs=rng.standard_normal((2, 6)),
        )
        path = tmp_path / "snaps.csv"
        write_snapshots(snaps, path)
        back = read_snapshots(path)
        np.testing.assert_array_equal(back.states, snaps.states)
        np.testing.assert_array_equal(back.times, snaps.times)
        np.testing.assert_array_equal(back.inputs, snaps.inputs)

    def test_no_inputs(self, rng, tmp_path):
        snaps = SnapshotMatrix(
            states=rng.standard_normal((3, 4)),
            times=np.arange(4.0),
            inputs=np.zeros((0, 4)),
        )
        path = tmp_path / "snaps.csv"
        write_snapshots(snaps, path)
        back = read_snapshots(path)
        assert back.inputs.shape == (0, 4)
        np.testing.assert_array_equal(back.states, snaps.states)

    def test_extreme_values_survive(self, tmp_path):
        X = np.array([[1e-300, 1e300, np.pi, -0.0]])
        snaps = SnapshotMatrix(
            states=X, times=np.arange(4.0), inputs=np.zeros((0, 4))
        )
        path = tmp_path / "snaps.csv"
        write_snapshots(snaps, path)
        np.testing.assert_array_equal(read_snapshots(path).states, X)

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# exactopinf-csv v1 basis\nt,x_1\n0,1\n")
        with pytest.raises(SchemaError) as excinfo:
            read_snapshots(path)
        assert excinfo.value.line == 1

    def test_version_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# exactopinf-csv v99 snapshots\nt,x_1\n0,1\n")
        with pytest.raises(SchemaError):
            read_snapshots(path)

    def test_short_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# exactopinf-csv v1 snapshots\nt,x_1,x_2\n0,1,2\n1,3\n")
        with pytest.raises(SchemaError) as excinfo:
            read_snapshots(path)
        assert excinfo.value.line == 4

    def test_non_numeric_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# exactopinf-csv v1 snapshots\nt,x_1\n0,abc\n")
        with pytest.raises(SchemaError) as excinfo:
            read_snapshots(path)
        assert excinfo.value.line == 3

    def test_empty_body_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# exactopinf-csv v1 snapshots\nt,x_1\n")
        with pytest.raises(SchemaError):
            read_snapshots(path)


class TestBasis:
    def test_round_trip_bit_exact(self, rng, tmp_path):
        X = rng.standard_normal((8, 12))
        basis = pod_basis(X, 4)
        vpath = tmp_path / "V.csv"
        spath = tmp_path / "sv.csv"
        write_basis(basis, vpath, spath)
        back = read_basis(vpath, spath)
        np.testing.assert_array_equal(back.V, basis.V)
        np.testing.assert_array_equal(back.singular_values, basis.singular_values)

    def test_singular_values_header_checked(self, rng, tmp_path):
        X = rng.standard_normal((4, 6))
        basis = pod_basis(X, 2)
        vpath = tmp_path / "V.csv"
        spath = tmp_path / "sv.csv"
        write_basis(basis, vpath, spath)
        with pytest.raises(SchemaError):
            read_basis(spath, vpath)  # swapped files have the wrong kinds


class TestOperator:
    def test_round_trip_bit_exact(self, rng, tmp_path):
        basis = MonomialBasis(n=3, degree_set=(0, 1, 2), n_u=2)
        op = AggregatedOperator(basis=basis, matrix=rng.standard_normal((3, basis.n_f)))
        path = tmp_path / "op.csv"
        write_operator(op, path)
        back = read_operator(path)
        np.testing.assert_array_equal(back.matrix, op.matrix)
        assert back.basis.degree_set == basis.degree_set
        assert back.basis.n_u == basis.n_u

    def test_missing_sidecar(self, rng, tmp_path):
        basis = MonomialBasis(n=2, degree_set=(1,))
        op = AggregatedOperator(basis=basis, matrix=rng.standard_normal((2, 2)))
        path = tmp_path / "op.csv"
        write_operator(op, path)
        (tmp_path / "op.csv.json").unlink()
        with pytest.raises(SchemaError, match="sidecar"):
            read_operator(path)

    def test_shape_sidecar_mismatch(self, rng, tmp_path):
        basis = MonomialBasis(n=2, degree_set=(1,))
        op = AggregatedOperator(basis=basis, matrix=rng.standard_normal((2, 2)))
        path = tmp_path / "op.csv"
        write_operator(op, path)
        sidecar = tmp_path / "op.csv.json"
        sidecar.write_text(sidecar.read_text().replace('"n": 2', '"n": 3'))
        with pytest.raises(SchemaError):
            read_operator(path)


class TestEnsemble:
    def _make_ensemble(self, rng):
        N, n = 6, 2
        from exactopinf.tensor_poly import monomial_count

        fom = from_dense_operators(
            {
                1: rng.standard_normal((N, N)),
                2: rng.standard_normal((N, monomial_count(N, 2))),
            },
            rng.standard_normal((N, 1)),
        )
        V = np.linalg.qr(rng.standard_normal((N, n)))[0]
        return generate_ensemble(fom, V, rank_ensuring_pairs(n, (1, 2), 1), 0.01)

    def test_round_trip_bit_exact(self, rng, tmp_path):
        ens = self._make_ensemble(rng)
        path = tmp_path / "ens.csv"
        write_ensemble(ens, path)
        back = read_ensemble(path)
        assert back.dt == ens.dt
        assert back.basis.degree_set == ens.basis.degree_set
        np.testing.assert_array_equal(back.derivatives, ens.derivatives)
        np.testing.assert_array_equal(back.P, ens.P)
        for a, b in zip(back.pairs, ens.pairs):
            assert a.provenance == b.provenance
            np.testing.assert_array_equal(a.state, b.state)
            np.testing.assert_array_equal(a.inp, b.inp)

    def test_round_trip_inference_identical(self, rng, tmp_path):
        ens = self._make_ensemble(rng)
        path = tmp_path / "ens.csv"
        write_ensemble(ens, path)
        a = infer(ens).operator.matrix
        b = infer(read_ensemble(path)).operator.matrix
        np.testing.assert_array_equal(a, b)

    def test_provenance_tags_in_file(self, rng, tmp_path):
        ens = self._make_ensemble(rng)
        path = tmp_path / "ens.csv"
        write_ensemble(ens, path)
        text = path.read_text()
        assert "state,1:1" in text  # degree-1 pair at the first unit vector
        assert "state,2:1.2" in text  # degree-2 mixed pair
        assert "input,1" in text

    def test_unknown_kind_reports_line(self, rng, tmp_path):
        ens = self._make_ensemble(rng)
        path = tmp_path / "ens.csv"
        write_ensemble(ens, path)
        lines = path.read_text().splitlines()
        lines[2] = lines[2].replace("state", "ghost", 1)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError) as excinfo:
            read_ensemble(path)
        assert excinfo.value.line == 3

    def test_wrong_column_count_rejected(self, rng, tmp_path):
        ens = self._make_ensemble(rng)
        path = tmp_path / "ens.csv"
        write_ensemble(ens, path)
        sidecar = tmp_path / "ens.csv.json"
        sidecar.write_text(sidecar.read_text().replace('"n": 2', '"n": 3'))
        with pytest.raises(SchemaError) as excinfo:
            read_ensemble(path)
        assert excinfo.value.line == 2


class TestReportRows:
    def test_rows_written(self, tmp_path):
        rep = DiagnosticsReport(
            benchmark="burgers",
            n=3,
            relative_operator_error=1e-12,
            cond_P=42.0,
            ensemble_size=9,
            block_errors={1: 0.0, 2: 0.0},
            energy_violation=1e-13,
            symmetry_violation=0.0,
            diffusion_eigenvalues=np.array([1.0, 2.0]),
        )
        path = tmp_path / "report.csv"
        write_report_rows([rep], path)
        text = path.read_text().splitlines()
        assert text[0] == "# exactopinf-csv v1 diagnostics"
        assert text[1].startswith("benchmark,n,")
        assert text[2].startswith("burgers,3,")

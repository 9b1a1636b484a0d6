import numpy as np
import pytest

from geoschwarz import (
    CSV_COLUMNS,
    ExperimentConfig,
    Sphere,
    Stiefel,
    build_reference,
    gen_endpoint_pair,
    global_shooting_baseline,
    load_experiment_configs,
    preset_configs,
    run_experiment,
)
from geoschwarz.cli import main as cli_main


class TestGenEndpointPair:
    def test_zero_distance(self):
        p, q = gen_endpoint_pair(Sphere(5), 0.0, seed=1)
        assert np.array_equal(p.coords, q.coords)

    def test_same_seed_bitwise_identical(self):
        for man in (Sphere(7), Stiefel(6, 2)):
            p1, q1 = gen_endpoint_pair(man, 0.7, seed=3)
            p2, q2 = gen_endpoint_pair(man, 0.7, seed=3)
            assert np.array_equal(p1.coords, p2.coords)
            assert np.array_equal(q1.coords, q2.coords)

    def test_sphere_distance_exact(self):
        p, q = gen_endpoint_pair(Sphere(100), 0.9 * np.pi, seed=5)
        got = np.arccos(np.clip(np.dot(p.coords, q.coords), -1, 1))
        assert abs(got - 0.9 * np.pi) <= 1e-10

    def test_stiefel_on_manifold(self):
        st = Stiefel(10, 3)
        p, q = gen_endpoint_pair(st, 1.1, seed=7)
        assert st.constraint_residual(p.coords) <= 1e-12
        assert st.constraint_residual(q.coords) <= 1e-12


class TestExperimentConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig("x", Sphere(4), m=4, distance=-1.0)
        with pytest.raises(ValueError):
            ExperimentConfig("x", Sphere(4), m=4, distance=np.pi)
        with pytest.raises(ValueError):
            ExperimentConfig("x", Sphere(4), m=2, distance=0.5)
        with pytest.raises(ValueError):
            ExperimentConfig("x", Sphere(4), m=4, distance=0.5,
                             methods=("bryner",))

    def test_stiefel_distance_above_pi_allowed(self):
        ExperimentConfig("x", Stiefel(6, 2), m=4, distance=3.5)


class TestReference:
    def test_sphere_closed_form(self):
        p, q = gen_endpoint_pair(Sphere(10), 0.8, seed=2)
        ref = build_reference(p, q)
        assert ref is not None
        assert ref.source == "closed_form"
        assert ref.replay_error <= 1e-10

    def test_stiefel_shooting_reference(self):
        st = Stiefel(8, 2)
        p, q, u = gen_endpoint_pair(st, 0.9, seed=4, return_tangent=True)
        ref = build_reference(p, q, gen_tangent=u)
        assert ref is not None
        assert ref.source == "high_accuracy_shooting"
        assert ref.replay_error <= 1e-9
        assert np.linalg.norm(ref.tangent.coords - 0.9 * u.coords) <= 1e-7


class TestGlobalShootingBaseline:
    def test_trivial_pair(self):
        p, q = gen_endpoint_pair(Sphere(6), 0.0, seed=1)
        rec = global_shooting_baseline(p, q)
        assert rec.converged
        assert rec.iterations <= 1

    def test_sphere_matches_closed_form(self):
        p, q, u = gen_endpoint_pair(Sphere(100), 0.1 * np.pi, seed=6,
                                    return_tangent=True)
        ref = build_reference(p, q)
        rec = global_shooting_baseline(p, q, tol=1e-10, reference=ref)
        assert rec.converged
        assert rec.rows[-1].error_to_reference <= 1e-8

    def test_failure_recorded_not_raised(self):
        # an unreachable tolerance must come back as a flagged record
        p, q = gen_endpoint_pair(Sphere(8), 0.8 * np.pi, seed=9)
        rec = global_shooting_baseline(p, q, tol=1e-16, max_iters=3)
        assert not rec.converged
        assert rec.status.startswith("failed:")
        assert len(rec.rows) >= 1


class TestRunExperiment:
    def test_csv_outputs(self, tmp_path):
        cfg = ExperimentConfig("unit", Sphere(3), m=4, distance=0.5 * np.pi,
                               methods=("leapfrog_gs",), seed=0)
        paths = run_experiment(cfg, out_dir=tmp_path)
        assert len(paths) == 1
        text = paths[0].read_text(encoding="utf-8")
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert "\r" not in text
        last = lines[-1].split(",")
        assert last[CSV_COLUMNS.index("status")] == "converged"
        assert float(last[CSV_COLUMNS.index("residual_inf")]) <= 1e-10

    def test_row_count_is_iterations_plus_one(self, tmp_path):
        cfg = ExperimentConfig("rows", Sphere(4), m=5, distance=1.2,
                               methods=("leapfrog_gs", "newton_schwarz"),
                               seed=1, init_mode="perturbed", init_sigma=0.1)
        for path in run_experiment(cfg, out_dir=tmp_path):
            lines = path.read_text().splitlines()
            iters = [int(line.split(",")[CSV_COLUMNS.index("iter")])
                     for line in lines[1:]]
            assert iters == list(range(len(iters)))

    def test_final_error_to_reference_bounded(self, tmp_path):
        cfg = ExperimentConfig("err", Sphere(3), m=4, distance=0.5 * np.pi,
                               methods=("leapfrog_gs",), seed=2, tol=1e-8)
        path = run_experiment(cfg, out_dir=tmp_path)[0]
        last = path.read_text().splitlines()[-1].split(",")
        err = float(last[CSV_COLUMNS.index("error_to_reference")])
        assert err <= 100 * 1e-8

    def test_bitwise_deterministic_without_timings(self, tmp_path):
        cfg = ExperimentConfig("det", Sphere(5), m=4, distance=1.0,
                               methods=("leapfrog_gs", "newton_schwarz"),
                               seed=3, record_timings=False)
        a = {p.name: p.read_bytes() for p in run_experiment(cfg, tmp_path / "a")}
        b = {p.name: p.read_bytes() for p in run_experiment(cfg, tmp_path / "b")}
        assert a == b

    def test_timings_written_when_enabled(self, tmp_path):
        cfg = ExperimentConfig("timed", Sphere(4), m=4, distance=1.0,
                               methods=("leapfrog_gs",), seed=4)
        path = run_experiment(cfg, out_dir=tmp_path)[0]
        last = path.read_text().splitlines()[-1].split(",")
        assert last[CSV_COLUMNS.index("wall_time_ms")] != ""

    def test_stiefel_experiment_with_baseline(self, tmp_path):
        cfg = ExperimentConfig("st", Stiefel(6, 2), m=4, distance=0.8,
                               methods=("leapfrog_gs", "global_shooting",
                                        "newton_schwarz"), seed=5)
        paths = run_experiment(cfg, out_dir=tmp_path)
        assert {p.name for p in paths} == {
            "st__leapfrog_gs.csv", "st__global_shooting.csv",
            "st__newton_schwarz.csv"}
        for p in paths:
            last = p.read_text().splitlines()[-1].split(",")
            assert last[CSV_COLUMNS.index("status")] == "converged"


class TestPresets:
    def test_fig2(self):
        cfgs = preset_configs("fig2", seed=11)
        assert [c.experiment_id for c in cfgs] == [
            "fig2_dist0.1pi", "fig2_dist0.5pi", "fig2_dist0.9pi"]
        assert all(isinstance(c.manifold, Sphere) and c.manifold.d == 100
                   for c in cfgs)
        assert [round(c.distance / np.pi, 2) for c in cfgs] == [0.1, 0.5, 0.9]
        assert all(c.seed == 11 for c in cfgs)

    def test_fig3_m_values(self):
        assert [c.m for c in preset_configs("fig3")] == [4, 7, 10]

    def test_fig4_and_desk_scale(self):
        full = preset_configs("fig4")
        desk = preset_configs("fig4-desk")
        assert [(c.manifold.n, c.manifold.p) for c in full] == [
            (100, 2), (100, 12), (100, 22)]
        assert [(c.manifold.n, c.manifold.p) for c in desk] == [
            (40, 2), (40, 6), (40, 12)]
        for c in full + desk:
            assert set(c.methods) == {"leapfrog_gs", "global_shooting",
                                      "newton_schwarz"}

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            preset_configs("fig9")


class TestConfigFile:
    def test_sweep_expansion(self, tmp_path):
        cfg_file = tmp_path / "exp.yaml"
        cfg_file.write_text(
            "experiment_id: sweep\n"
            "manifold: {kind: sphere, d: 10}\n"
            "m: [4, 7]\n"
            "distance: [0.25pi, 0.5]\n"
            "methods: [leapfrog_gs]\n"
            "seed: 3\n",
            encoding="utf-8")
        cfgs = load_experiment_configs(cfg_file)
        assert len(cfgs) == 4
        ids = {c.experiment_id for c in cfgs}
        assert "sweep_dist0.785398_m4" in ids
        assert any(abs(c.distance - 0.25 * np.pi) < 1e-12 for c in cfgs)

    def test_stiefel_p_sweep_and_multidoc(self, tmp_path):
        cfg_file = tmp_path / "exp.yaml"
        cfg_file.write_text(
            "experiment_id: first\n"
            "manifold: {kind: stiefel, n: 12, p: [2, 3]}\n"
            "distance: 0.8\n"
            "---\n"
            "experiment_id: second\n"
            "manifold: {kind: sphere, d: 5}\n"
            "distance: 1.0\n"
            "tol: 1e-6\n"
            "init: {mode: perturbed, sigma: 0.1, seed: 2}\n",
            encoding="utf-8")
        cfgs = load_experiment_configs(cfg_file)
        assert len(cfgs) == 3
        assert [c.experiment_id for c in cfgs] == ["first_p2", "first_p3",
                                                   "second"]
        assert cfgs[0].manifold == Stiefel(12, 2)
        assert cfgs[2].tol == 1e-6
        assert cfgs[2].init_mode == "perturbed"

    def test_bad_manifold(self, tmp_path):
        cfg_file = tmp_path / "exp.yaml"
        cfg_file.write_text("experiment_id: x\ndistance: 1\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_experiment_configs(cfg_file)


class TestCli:
    def test_preset_run(self, tmp_path, capsys):
        rc = cli_main(["preset", "fig2", "--out", str(tmp_path),
                       "--methods", "leapfrog_gs", "--tol", "1e-4",
                       "--max-iters", "50", "--no-timings"])
        assert rc == 0
        written = sorted(p.name for p in tmp_path.glob("*.csv"))
        assert written == ["fig2_dist0.1pi__leapfrog_gs.csv",
                           "fig2_dist0.5pi__leapfrog_gs.csv",
                           "fig2_dist0.9pi__leapfrog_gs.csv"]

    def test_run_with_config(self, tmp_path):
        cfg_file = tmp_path / "exp.yaml"
        cfg_file.write_text(
            "experiment_id: cli\n"
            "manifold: {kind: sphere, d: 4}\n"
            "distance: 1.0\n"
            "methods: [leapfrog_gs]\n",
            encoding="utf-8")
        rc = cli_main(["run", "--config", str(cfg_file), "--out",
                       str(tmp_path / "o"), "--seed", "9", "--no-timings"])
        assert rc == 0
        text = (tmp_path / "o" / "cli__leapfrog_gs.csv").read_text()
        assert text.splitlines()[1].split(",")[CSV_COLUMNS.index("seed")] == "9"

    def test_bad_methods_rejected(self):
        with pytest.raises(SystemExit):
            cli_main(["preset", "fig2", "--methods", "bryner"])

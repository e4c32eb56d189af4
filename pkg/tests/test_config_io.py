"""Config text format, norm output files, and binary checkpoints."""

import json
import struct

import numpy as np
import pytest

from moistpe import config as config_mod
from moistpe.checkpoint import MAGIC, read_checkpoint, write_checkpoint
from moistpe.config import (
    RunConfig,
    build_grid,
    build_params,
    build_step_config,
    parse,
    parse_forcing_kind,
    parse_initial_kind,
    serialize,
)
from moistpe.errors import ConfigError, DataError
from moistpe.initial import random_smooth
from moistpe.monitors import NormReport
from moistpe.output import (
    budget_residual_by_time,
    csv_mirror_path,
    read_norms,
    write_norms,
)
from moistpe.params import PhysParams
from moistpe.stepper import StepConfig, TrajectorySample, run


# --- config text ----------------------------------------------------------


def test_defaults_roundtrip():
    cfg = RunConfig()
    assert parse(serialize(cfg)) == cfg


def test_custom_values_roundtrip():
    cfg = RunConfig(nx=48, p0=0.17, dt=2.5e-4, theta_bar="linear:1.0,0.5",
                    adapt=True, initial_kind="random_smooth:9,0.5,2",
                    norms_path="/tmp/x.ndjson", checkpoint_every=7)
    assert parse(serialize(cfg)) == cfg


def test_comments_and_blank_lines_ignored():
    cfg = parse("# header\n\ngrid.nx = 16\n  # indented comment\ntime.dt = 1e-2\n")
    assert cfg.nx == 16
    assert cfg.dt == 1e-2
    assert cfg.ny == RunConfig().ny


def test_unknown_key_names_line():
    with pytest.raises(ConfigError, match=r"line 3.*grid\.nz"):
        parse("grid.nx = 16\ngrid.ny = 16\ngrid.nz = 16\n")


def test_duplicate_key_names_line():
    with pytest.raises(ConfigError, match=r"line 2.*duplicate.*grid\.nx"):
        parse("grid.nx = 16\ngrid.nx = 32\n")


def test_missing_equals_sign():
    with pytest.raises(ConfigError, match="line 1"):
        parse("grid.nx 16\n")


def test_unparseable_value_names_key():
    with pytest.raises(ConfigError, match=r"line 1.*grid\.nx"):
        parse("grid.nx = banana\n")


@pytest.mark.parametrize("text, fragment", [
    ("grid.nx = 7\n", "grid.nx"),
    ("domain.p0 = 1.0\ndomain.p1 = 0.5\n", "domain.p0"),
    ("physics.mu_v = -1e-3\n", "physics.mu_v"),
    ("time.scheme = leapfrog\n", "time.scheme"),
    ("time.cfl_target = 1.5\n", "time.cfl_target"),
    ("initial.symmetry = mirror\n", "initial.symmetry"),
    ("output.norms_every = 0\n", "output.norms_every"),
    ("physics.theta_bar = wavy:1.0\n", "physics.theta_bar"),
])
def test_validation_errors_name_dotted_keys(text, fragment):
    with pytest.raises(ConfigError, match=fragment.replace(".", r"\.")):
        parse(text)


def test_parse_initial_kind_variants():
    assert parse_initial_kind("rest") == ("rest", {})
    kind, args = parse_initial_kind("random_smooth:42")
    assert kind == "random_smooth"
    assert args == {"seed": 42, "amplitude": 1.0, "band": None}
    _, args = parse_initial_kind("random_smooth:42,0.5,3")
    assert args == {"seed": 42, "amplitude": 0.5, "band": 3}
    _, args = parse_initial_kind("random_smooth:seed=1,band=2")
    assert args == {"seed": 1, "amplitude": 1.0, "band": 2}
    kind, args = parse_initial_kind("file:/tmp/state.mpes")
    assert kind == "file" and args == {"path": "/tmp/state.mpes"}

    for bad in ("random_smooth:", "random_smooth:1,2,3,4", "random_smooth:a",
                "random_smooth:amplitude=2", "random_smooth:1,-0.5", "warmpool"):
        with pytest.raises(ConfigError):
            parse_initial_kind(bad)


def test_parse_forcing_kind_variants():
    assert parse_forcing_kind("zero") == ("zero", "")
    assert parse_forcing_kind("manufactured:gentle") == ("manufactured", "gentle")
    assert parse_forcing_kind("file:f.npz") == ("file", "f.npz")
    for bad in ("manufactured:", "file:", "windstress"):
        with pytest.raises(ConfigError):
            parse_forcing_kind(bad)


def test_builders_materialize_config():
    cfg = RunConfig(nx=16, ny=16, np=16, p0=0.25, p1=0.75,
                    theta_bar="linear:1.0,0.5", dt=5e-4, t_end=0.1,
                    scheme="erk4_fully_explicit", cfl_target=0.25)
    grid = build_grid(cfg)
    assert grid.shape == (16, 16, 16)
    assert grid.Lp == pytest.approx(0.5)
    params = build_params(cfg)
    assert params.theta_bar.kind == "linear"
    assert params.theta_bar.b == 0.5
    step = build_step_config(cfg)
    assert step == StepConfig(dt=5e-4, t_end=0.1, scheme="erk4_fully_explicit",
                              cfl_target=0.25)


# --- norm output files ----------------------------------------------------


@pytest.fixture()
def short_trajectory(params):
    from moistpe.grid import Grid
    g = Grid(8, 8, 8, params.p0, params.p1)
    st = random_smooth(g, 2, amplitude=0.5, band=2)
    return run(st, params, StepConfig(dt=1e-3, t_end=5e-3), collect_budget=True)


def test_norms_roundtrip_and_mirror(tmp_path, short_trajectory):
    path = tmp_path / "norms.ndjson"
    write_norms(str(path), short_trajectory.samples)
    rows = read_norms(str(path))
    assert len(rows) == len(short_trajectory.samples)
    expected_keys = set(NormReport.field_names()) | {"checksum"}
    assert set(rows[0]) == expected_keys

    # endpoints have no centered difference, so their residual is null
    assert rows[0]["budget_residual"] is None
    assert rows[-1]["budget_residual"] is None
    assert any(r["budget_residual"] is not None for r in rows)

    # JSON round-trips float64 exactly
    for row, sample in zip(rows, short_trajectory.samples):
        assert row["t"] == sample.t
        assert row["l2_v"] == sample.report.l2_v
        assert row["checksum"] == sample.checksum

    csv_path = tmp_path / "norms.csv"
    assert csv_path.exists()
    lines = csv_path.read_text().strip().splitlines()
    assert len(lines) == len(rows) + 1
    assert lines[0].split(",")[0] == "t"


def test_csv_mirror_path_rules():
    assert csv_mirror_path("/a/b/run.ndjson") == "/a/b/run.csv"
    assert csv_mirror_path("/a/b/run.csv") == "/a/b/run_mirror.csv"


def test_budget_residuals_need_uniform_triples():
    assert budget_residual_by_time([]) == {}
    stubs = [TrajectorySample(t, "", None, {}) for t in (0.0, 0.1)]
    assert budget_residual_by_time(stubs) == {}
    ragged = [TrajectorySample(t, "", None, {}) for t in (0.0, 0.1, 0.4, 0.5)]
    assert budget_residual_by_time(ragged) == {}


# --- checkpoints ----------------------------------------------------------


def test_checkpoint_roundtrip_is_bit_exact(tmp_path, params):
    from moistpe.grid import Grid
    from moistpe.state import State
    g = Grid(16, 16, 16, params.p0, params.p1)
    phys = random_smooth(g, 12, amplitude=1.0).as_physical()
    state = State(phys.v1, phys.v2, phys.theta, phys.q, t=0.625)
    cfg = RunConfig(nx=16, ny=16, np=16, dt=1e-3, t_end=2.0)
    path = tmp_path / "state.mpes"
    write_checkpoint(str(path), state, cfg)

    cfg2, state2 = read_checkpoint(str(path))
    assert cfg2.t0 == state.t
    assert cfg2.with_(t0=cfg.t0) == cfg
    for a, b in zip(state.as_physical().fields, state2.as_physical().fields):
        assert np.array_equal(a.data, b.data)
    assert state2.t == state.t


def test_checkpoint_binary_layout(tmp_path, params):
    from moistpe.grid import Grid
    g = Grid(8, 8, 8, params.p0, params.p1)
    state = random_smooth(g, 1, amplitude=1.0)
    cfg = RunConfig(nx=8, ny=8, np=8)
    path = tmp_path / "s.mpes"
    write_checkpoint(str(path), state, cfg)
    raw = path.read_bytes()
    assert raw[:4] == MAGIC
    assert struct.unpack_from("<I", raw, 4)[0] == 1
    assert struct.unpack_from("<III", raw, 8) == (8, 8, 8)
    (blob_len,) = struct.unpack_from("<I", raw, 20)
    assert len(raw) == 24 + blob_len + 4 * 8 * 8 * 8 * 8
    text = raw[24:24 + blob_len].decode("utf-8")
    assert "grid.nx = 8" in text


def test_checkpoint_rejects_corruption(tmp_path, params):
    from moistpe.grid import Grid
    g = Grid(8, 8, 8, params.p0, params.p1)
    state = random_smooth(g, 1, amplitude=1.0)
    cfg = RunConfig(nx=8, ny=8, np=8)
    path = tmp_path / "s.mpes"
    write_checkpoint(str(path), state, cfg)
    raw = bytearray(path.read_bytes())

    bad_magic = tmp_path / "bad_magic.mpes"
    bad_magic.write_bytes(b"XXXX" + bytes(raw[4:]))
    with pytest.raises(DataError, match="magic"):
        read_checkpoint(str(bad_magic))

    bad_version = tmp_path / "bad_version.mpes"
    patched = bytearray(raw)
    struct.pack_into("<I", patched, 4, 99)
    bad_version.write_bytes(bytes(patched))
    with pytest.raises(DataError, match="version"):
        read_checkpoint(str(bad_version))

    bad_dims = tmp_path / "bad_dims.mpes"
    patched = bytearray(raw)
    struct.pack_into("<III", patched, 8, 16, 8, 8)
    bad_dims.write_bytes(bytes(patched))
    with pytest.raises(DataError, match="disagree"):
        read_checkpoint(str(bad_dims))

    truncated = tmp_path / "truncated.mpes"
    truncated.write_bytes(bytes(raw[:-100]))
    with pytest.raises(DataError):
        read_checkpoint(str(truncated))

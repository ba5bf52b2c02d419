"""End-to-end command line behavior through cli.main()."""

import json
from pathlib import Path

import pytest

from pupsolver import (
    BinPackingInstance,
    emit_instance,
    emit_solution,
    parse_instance,
    parse_solution,
)
from pupsolver.cli import (
    EXIT_ERROR,
    EXIT_SAT,
    EXIT_TIMEOUT,
    EXIT_UNSAT,
    convert_external_instance,
    main,
)
from pupsolver.reductions import binpack_to_pup_iucap2

from datagen import rail_instance


REPO_INSTANCES = Path(__file__).resolve().parents[1] / "instances"


@pytest.fixture
def rail_file(tmp_path):
    p = tmp_path / "rail.pup"
    p.write_text(emit_instance(rail_instance()), encoding="utf-8")
    return p


@pytest.fixture
def star_file(tmp_path):
    from pupsolver import Instance

    inst = Instance(("hub",), ("a", "b", "c"),
                    (("hub", "a"), ("hub", "b"), ("hub", "c")), 1, 1)
    p = tmp_path / "star.pup"
    p.write_text(emit_instance(inst), encoding="utf-8")
    return p


# ===== solve =====


def test_solve_satisfiable(rail_file, capsys):
    rc = main(["solve", "--instance", str(rail_file)])
    captured = capsys.readouterr()
    assert rc == EXIT_SAT
    assert "satisfiable: 3 units" in captured.err
    g = parse_solution(captured.out)
    assert len(g.units) == 3


def test_solve_output_file(rail_file, tmp_path, capsys):
    out = tmp_path / "sol.txt"
    rc = main(["solve", "--instance", str(rail_file), "-o", str(out)])
    captured = capsys.readouterr()
    assert rc == EXIT_SAT
    assert captured.out == ""
    g = parse_solution(out.read_text(encoding="utf-8"))
    assert len(g.units) == 3


def test_solve_stats_on_stderr(rail_file, capsys):
    rc = main(["solve", "--instance", str(rail_file), "--stats"])
    captured = capsys.readouterr()
    assert rc == EXIT_SAT
    assert "nodes" in captured.err
    assert "units_after_minimize" in captured.err


def test_solve_emit_graph(rail_file, tmp_path):
    dot = tmp_path / "sol.dot"
    rc = main(["solve", "--instance", str(rail_file), "--emit-graph", str(dot)])
    assert rc == EXIT_SAT
    assert dot.read_text(encoding="utf-8").lstrip().startswith("graph")


def test_solve_unsatisfiable_globally(star_file, capsys):
    rc = main(["solve", "--instance", str(star_file)])
    captured = capsys.readouterr()
    assert rc == EXIT_UNSAT
    assert "unsatisfiable (for any unit count)" in captured.err


def test_solve_unsatisfiable_within_budget(tmp_path, capsys):
    from pupsolver import Instance

    inst = Instance((), ("s1", "s2", "s3"), (), 1, 0)
    p = tmp_path / "three.pup"
    p.write_text(emit_instance(inst), encoding="utf-8")
    rc = main(["solve", "--instance", str(p), "--max-units", "2"])
    captured = capsys.readouterr()
    assert rc == EXIT_UNSAT
    assert "unsatisfiable (within unit budget)" in captured.err


def test_solve_timeout(tmp_path, capsys):
    inst, budget = binpack_to_pup_iucap2(BinPackingInstance((3,), 2, 2))
    p = tmp_path / "hard.pup"
    p.write_text(emit_instance(inst), encoding="utf-8")
    rc = main(["solve", "--instance", str(p),
               "--max-units", str(budget), "--max-time-ms", "150"])
    captured = capsys.readouterr()
    assert rc == EXIT_TIMEOUT
    assert "timeout" in captured.err


def test_solve_parallel_flag(rail_file, capsys):
    rc = main(["solve", "--instance", str(rail_file), "--parallel"])
    assert rc == EXIT_SAT
    assert "satisfiable" in capsys.readouterr().err


def test_solve_parse_error(tmp_path, capsys):
    p = tmp_path / "broken.pup"
    p.write_text("nonsense line\n", encoding="utf-8")
    rc = main(["solve", "--instance", str(p)])
    captured = capsys.readouterr()
    assert rc == EXIT_ERROR
    assert captured.err.startswith("error:")


def test_solve_missing_file(tmp_path, capsys):
    rc = main(["solve", "--instance", str(tmp_path / "nope.pup")])
    assert rc == EXIT_ERROR
    assert "error:" in capsys.readouterr().err


def test_solve_rejects_bad_config(rail_file, capsys):
    rc = main(["solve", "--instance", str(rail_file), "--max-units", "0"])
    assert rc == EXIT_ERROR
    assert "max_units" in capsys.readouterr().err


# ===== usage errors =====


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["solve"],
    ["solve", "--instance"],
    ["solve", "--instance", "x", "--bogus-flag"],
    ["verify", "--instance", "x"],
    ["lift", "--instance", "x"],
])
def test_usage_errors_exit_3(argv, capsys):
    assert main(argv) == EXIT_ERROR
    capsys.readouterr()


# ===== verify =====


def test_verify_roundtrip_ok(rail_file, tmp_path, capsys):
    sol = tmp_path / "sol.txt"
    assert main(["solve", "--instance", str(rail_file), "-o", str(sol)]) == EXIT_SAT
    capsys.readouterr()
    rc = main(["verify", "--instance", str(rail_file), "--solution", str(sol)])
    captured = capsys.readouterr()
    assert rc == 0
    assert "ok" in captured.err
    assert captured.out == ""


def test_verify_reports_violations(rail_file, tmp_path, capsys):
    sol = tmp_path / "sol.txt"
    assert main(["solve", "--instance", str(rail_file), "-o", str(sol)]) == EXIT_SAT
    capsys.readouterr()
    g = parse_solution(sol.read_text(encoding="utf-8"))
    assignment = dict(g.assignment)
    del assignment["S6"]
    from pupsolver import SolutionGraph

    tampered = SolutionGraph(g.units, assignment, g.partners,
                             rail_instance().indicators, rail_instance().sensors)
    sol.write_text(emit_solution(tampered), encoding="utf-8")
    rc = main(["verify", "--instance", str(rail_file), "--solution", str(sol)])
    captured = capsys.readouterr()
    assert rc == 1
    assert "UnassignedElement" in captured.out
    assert "1 violation(s)" in captured.err


def test_verify_bad_solution_file(rail_file, tmp_path, capsys):
    bad = tmp_path / "sol.txt"
    bad.write_text("assign I1 u1\n", encoding="utf-8")  # u1 never declared
    rc = main(["verify", "--instance", str(rail_file), "--solution", str(bad)])
    assert rc == EXIT_ERROR
    capsys.readouterr()


# ===== oracle =====


def test_oracle_min_units(rail_file, capsys):
    rc = main(["oracle", "--instance", str(rail_file), "--min-units"])
    captured = capsys.readouterr()
    assert rc == EXIT_SAT
    assert captured.out.strip() == "3"


def test_oracle_decision(rail_file, star_file, capsys):
    assert main(["oracle", "--instance", str(rail_file)]) == EXIT_SAT
    assert capsys.readouterr().out.strip() == "SAT"
    assert main(["oracle", "--instance", str(star_file)]) == EXIT_UNSAT
    assert capsys.readouterr().out.strip() == "UNSAT"


def test_oracle_budget_flag(rail_file, capsys):
    rc = main(["oracle", "--instance", str(rail_file), "--max-units", "2"])
    assert rc == EXIT_UNSAT
    assert capsys.readouterr().out.strip() == "UNSAT"


def test_oracle_size_guard(tmp_path, capsys):
    from pupsolver import Instance

    inst = Instance(tuple(f"i{k}" for k in range(13)), (), (), 2, 0)
    p = tmp_path / "big.pup"
    p.write_text(emit_instance(inst), encoding="utf-8")
    assert main(["oracle", "--instance", str(p)]) == EXIT_ERROR
    capsys.readouterr()
    rc = main(["oracle", "--instance", str(p), "--max-elements", "13"])
    assert rc == EXIT_SAT
    capsys.readouterr()


# ===== reduce and lift =====


def test_reduce_flags_to_stdout(capsys):
    rc = main(["reduce", "--items", "2", "--binsize", "2", "--bins", "1"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "expected units: 3" in captured.err
    inst = parse_instance(captured.out)
    assert inst.ucap == 3 and inst.iucap == 2
    assert len(inst.indicators) == 8


def test_reduce_binpack_file(tmp_path, capsys):
    bp = tmp_path / "packing.txt"
    bp.write_text("items 2 ; binsize 2 ; bins 1\n", encoding="utf-8")
    out = tmp_path / "reduced.pup"
    rc = main(["reduce", "--binpack", str(bp), "-o", str(out)])
    capsys.readouterr()
    assert rc == 0
    inst = parse_instance(out.read_text(encoding="utf-8"))
    ref, _ = binpack_to_pup_iucap2(BinPackingInstance((2,), 2, 1))
    assert inst == ref


def test_reduce_double_only(capsys):
    rc = main(["reduce", "--items", "1", "2", "--binsize", "3", "--bins", "2",
               "--double-only"])
    captured = capsys.readouterr()
    assert rc == 0
    assert captured.out.strip() == "items 2 4 ; binsize 6 ; bins 2"


def test_reduce_double_then_reduce(capsys):
    rc = main(["reduce", "--items", "1", "--binsize", "1", "--bins", "1",
               "--double"])
    captured = capsys.readouterr()
    assert rc == 0
    inst = parse_instance(captured.out)
    ref, _ = binpack_to_pup_iucap2(BinPackingInstance((2,), 2, 1))
    assert inst == ref


def test_reduce_needs_input(capsys):
    assert main(["reduce", "--items", "1"]) == EXIT_ERROR
    assert "error:" in capsys.readouterr().err


def test_lift_round_trip(tmp_path, capsys):
    from pupsolver import Instance

    inst = Instance(("i1",), ("s1",), (("i1", "s1"),), 2, 0)
    p = tmp_path / "flat.pup"
    p.write_text(emit_instance(inst), encoding="utf-8")
    rc = main(["lift", "--instance", str(p), "--units", "2"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "lifted unit budget: 4" in captured.err
    lifted = parse_instance(captured.out)
    assert lifted.iucap == 1
    assert len(lifted.edges) == 4


def test_lift_rejects_nonzero_iucap(rail_file, capsys):
    rc = main(["lift", "--instance", str(rail_file), "--units", "2"])
    assert rc == EXIT_ERROR
    capsys.readouterr()


# ===== bench =====


def write_bench_tree(tmp_path, star_expect="UNSAT"):
    (tmp_path / "rail.pup").write_text(emit_instance(rail_instance()), encoding="utf-8")
    from pupsolver import Instance

    star = Instance(("hub",), ("a", "b", "c"),
                    (("hub", "a"), ("hub", "b"), ("hub", "c")), 1, 1)
    (tmp_path / "star.pup").write_text(emit_instance(star), encoding="utf-8")
    manifest = tmp_path / "suite.txt"
    manifest.write_text(
        "# expected column: min units or UNSAT\n"
        "rail.pup 2 2 3\n"
        f"star.pup 1 1 {star_expect}\n"
        "rail.pup 9 0 1\n",
        encoding="utf-8",
    )
    return manifest


def test_bench_green_run(tmp_path, capsys):
    manifest = write_bench_tree(tmp_path)
    records = tmp_path / "records.jsonl"
    rc = main(["bench", "--manifest", str(manifest), "--records", str(records)])
    captured = capsys.readouterr()
    assert rc == 0
    lines = captured.out.splitlines()
    assert lines[0].startswith("instance")
    assert len(lines) == 4
    rows = [json.loads(line) for line in records.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 3
    assert rows[0]["outcome"] == "satisfiable"
    assert rows[0]["units"] == 3 and rows[0]["delta_units"] == 0
    assert rows[1]["outcome"] == "unsatisfiable"
    assert rows[2]["units"] == 1  # manifest ucap/iucap override the file


def test_bench_mismatch_exits_nonzero(tmp_path, capsys):
    manifest = write_bench_tree(tmp_path, star_expect="2")
    rc = main(["bench", "--manifest", str(manifest)])
    captured = capsys.readouterr()
    assert rc == 1
    assert "MISMATCH" in captured.out


def test_bench_missing_instance_noted(tmp_path, capsys):
    manifest = tmp_path / "suite.txt"
    manifest.write_text("ghost.pup 2 2 3\n", encoding="utf-8")
    rc = main(["bench", "--manifest", str(manifest)])
    captured = capsys.readouterr()
    assert rc == 1
    assert "error" in captured.out


def test_bench_bad_manifest(tmp_path, capsys):
    manifest = tmp_path / "suite.txt"
    manifest.write_text("rail.pup 2\n", encoding="utf-8")
    assert main(["bench", "--manifest", str(manifest)]) == EXIT_ERROR
    capsys.readouterr()


# ===== shipped sample instances =====


def test_shipped_rail_instance(capsys):
    rc = main(["solve", "--instance", str(REPO_INSTANCES / "rail.pup")])
    assert rc == EXIT_SAT
    assert "3 units" in capsys.readouterr().err


def test_shipped_star_instance(capsys):
    rc = main(["solve", "--instance", str(REPO_INSTANCES / "star-unsat.pup")])
    assert rc == EXIT_UNSAT
    capsys.readouterr()


def test_external_conversion_is_explicitly_unimplemented():
    with pytest.raises(NotImplementedError):
        convert_external_instance("archive.xml")

import io

from lintab.cli import EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, RunConfig, main, run


def invoke(path, query=None, stdin="", **kw):
    cfg = RunConfig(program_path=path, query=query, **kw)
    out, err = io.StringIO(), io.StringIO()
    code = run(cfg, stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_variable_query_streams_bindings(program_path):
    code, out, err = invoke(program_path("p1.pl"), "reach(a,X)")
    assert code == EXIT_OK
    assert out.splitlines() == ["X = a", "X = b", "X = d", "X = e", "no"]
    assert err == ""


def test_two_variable_bindings_on_one_line(program_path):
    code, out, _ = invoke(program_path("p3.pl"), "p(X,Y)")
    assert code == EXIT_OK
    assert out.splitlines() == ["X = a, Y = b", "X = a, Y = c", "no"]


def test_ground_query_yes_no(program_path):
    assert invoke(program_path("p5_1.pl"), "not_p(a)")[:2] == (EXIT_OK, "yes\n")
    assert invoke(program_path("p5_2.pl"), "not_p(a)")[:2] == (EXIT_OK, "no\n")
    assert invoke(program_path("p5_3.pl"), "not_p(a)")[:2] == (EXIT_OK, "yes\n")


def test_unknown_predicate_is_just_empty(program_path):
    code, out, err = invoke(program_path("p1.pl"), "zzz(a)")
    assert (code, out, err) == (EXIT_OK, "no\n", "")


def test_dump_tables(program_path):
    code, out, _ = invoke(program_path("p1.pl"), "reach(a,X)", dump_tables=True)
    assert code == EXIT_OK
    assert out.splitlines()[-1] == (
        "TB(reach(a,_0)): answers=[(a),(b),(d),(e)] status=[1,0,0] comp=1"
    )


def test_trace_goes_to_stderr(program_path):
    code, out, err = invoke(program_path("p1.pl"), "reach(a,X)", trace=True)
    assert code == EXIT_OK
    assert "EVENT kind=expand" in err
    assert "EVENT" not in out


def test_step_budget_exit(program_path):
    code, out, _ = invoke(program_path("p1.pl"), "reach(a,X)", step_budget=5)
    assert code == EXIT_RESOURCE
    assert out.splitlines()[-1] == "resource-limit: step budget exceeded"


def test_sld_engine_hits_depth_bound(program_path):
    code, out, _ = invoke(
        program_path("p1.pl"), "reach(a,X)", engine="sld", depth_bound=50
    )
    assert code == EXIT_RESOURCE
    assert out.splitlines()[-1] == "resource-limit: depth bound exceeded"
    assert "X = b" in out


def test_sld_engine_completes(program_path):
    code, out, _ = invoke(
        program_path("p5_2.pl"), "not_p(a)", engine="sld", depth_bound=100
    )
    assert (code, out) == (EXIT_OK, "no\n")


def test_bottomup_engine(program_path):
    code, out, _ = invoke(program_path("p1.pl"), "reach(a,X)", engine="bottomup")
    assert code == EXIT_OK
    assert out.splitlines() == ["X = a", "X = b", "X = d", "X = e", "no"]


def test_bottomup_engine_rejects_cuts(program_path):
    code, out, err = invoke(program_path("p4.pl"), "p(X,Y)", engine="bottomup")
    assert code == EXIT_USAGE
    assert "cannot evaluate" in err


def test_parse_error_in_program(tmp_path):
    bad = tmp_path / "bad.pl"
    bad.write_text("p(a")
    code, out, err = invoke(str(bad), "p(X)")
    assert code == EXIT_USAGE
    assert "error" in err and "line 1" in err


def test_parse_error_in_query(program_path):
    code, _, err = invoke(program_path("p1.pl"), "reach(a,X), !")
    assert code == EXIT_USAGE
    assert "cut is not allowed" in err


def test_missing_file():
    code, _, err = invoke("no/such/file.pl", "p(X)")
    assert code == EXIT_USAGE
    assert "cannot read" in err


def test_interactive_session(program_path):
    stdin = "reach(a,X).\n;\nnope\nnot_p(a).\nhalt.\n"
    code, out, err = invoke(program_path("p1.pl"), stdin=stdin, interactive=True)
    assert code == EXIT_OK
    assert "?- " in out
    assert "X = a" in out and "X = b" in out
    assert "X = d" not in out  # abandoned after the non-';' line
    assert "no\n" in out  # unknown not_p in this program
    assert "error" not in err


def test_interactive_parse_error_keeps_going(program_path):
    stdin = "p(a\nreach(e,e).\n"
    code, out, err = invoke(program_path("p1.pl"), stdin=stdin, interactive=True)
    assert code == EXIT_OK
    assert "error" in err
    assert "yes" in out


def test_main_argv_round_trip(program_path, capsys):
    code = main(["run", program_path("p1.pl"), "-q", "reach(a,X)"])
    captured = capsys.readouterr()
    assert code == EXIT_OK
    assert captured.out.splitlines()[-1] == "no"


def test_main_rejects_bad_engine(program_path, capsys):
    code = main(["run", program_path("p1.pl"), "-q", "p(X)", "--engine", "bogus"])
    capsys.readouterr()
    assert code == EXIT_USAGE


def test_main_requires_query_or_interactive(program_path, capsys):
    code = main(["run", program_path("p1.pl")])
    capsys.readouterr()
    assert code == EXIT_USAGE


def test_main_help_is_clean(capsys):
    code = main(["--help"])
    captured = capsys.readouterr()
    assert code == EXIT_OK
    assert "tp" in captured.out

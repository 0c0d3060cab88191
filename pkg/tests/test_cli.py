import json

import pytest

from qpolis.cli import main
from qpolis.finite.space import chain, sierpinski
from qpolis.posite import from_order


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


@pytest.fixture
def files(tmp_path):
    vee = from_order(["top", "a", "b"], [("a", "top"), ("b", "top")],
                     [(["a", "b"], "top"), (["a"], "a"), (["b"], "b")])
    S = sierpinski().to_json()
    return {
        "s": write(tmp_path, "s.json", S),
        "c3": write(tmp_path, "c3.json", chain(3).to_json()),
        "vee": write(tmp_path, "vee.json", vee.to_json()),
        "map": write(tmp_path, "m.json", {"target": S, "graph": {"0": 0, "1": 0, "2": 1}}),
        "bad": str(tmp_path / "bad.json"),
        "tmp": tmp_path,
    }


def test_verify_exit_codes_and_determinism(capsys, files):
    code, first, _ = run(capsys, "verify", "baire", "--seed", "7")
    assert code == 0 and json.loads(first)["pass"]
    assert run(capsys, "verify", "baire", "--seed", "7")[1] == first
    code, _, err = run(capsys, "verify", "nosuch")
    assert code == 2 and json.loads(err)["error"] == "UNKNOWN_SUITE"


def test_verify_writes_output_file(capsys, files):
    out = files["tmp"] / "report.json"
    assert run(capsys, "verify", "baire", "--output", str(out))[0] == 0
    assert json.loads(out.read_text())["manifest"]["command"] == "verify baire"


def test_convert_sierpinski_has_one_index(capsys, files):
    code, out, _ = run(capsys, "convert", "--input", files["s"], "--from", "finite-space",
                       "--to", "copresentation")
    data = json.loads(out)
    assert code == 0 and data["round_trip"]
    assert data["copresentation"]["indices"] == 1


def test_convert_to_posite(capsys, files):
    code, out, _ = run(capsys, "convert", "--input", files["c3"], "--from", "finite-space",
                       "--to", "posite")
    assert code == 0 and json.loads(out)["axioms"]


def test_convert_errors(capsys, files):
    code, _, err = run(capsys, "convert", "--input", files["vee"], "--from", "posite",
                       "--to", "finite-space")
    assert code == 2 and json.loads(err)["error"] == "UNSUPPORTED_CONVERSION"
    with open(files["bad"], "w") as fh:
        fh.write("{points:")
    code, _, err = run(capsys, "convert", "--input", files["bad"], "--from", "finite-space",
                       "--to", "posite")
    assert code == 2 and json.loads(err)["error"] == "SCHEMA_ERROR"
    code, _, err = run(capsys, "convert", "--input", files["vee"], "--from", "finite-space",
                       "--to", "posite")
    assert code == 2 and json.loads(err)["error"] == "SCHEMA_ERROR"


@pytest.mark.parametrize("name", ["dedekind", "generic-filter", "powerspace", "choquet"])
def test_demos(capsys, name):
    code, out, _ = run(capsys, "demo", name)
    assert code == 0 and out.strip()


def test_demo_dedekind_reports_no_violations(capsys):
    out = run(capsys, "demo", "dedekind")[1]
    assert "fuel 50" in out and "0 violated" in out


def test_unknown_demo(capsys):
    code, _, err = run(capsys, "demo", "nope")
    assert code == 2 and json.loads(err)["error"] == "UNKNOWN_DEMO"


def test_usage_error_exit_code(capsys):
    assert run(capsys, "frobnicate")[0] == 2


@pytest.mark.parametrize("check", ["essential", "bairequant", "kuratowski-ulam",
                                   "open-surjection"])
def test_oracle_map_checks(capsys, files, check):
    code, out, _ = run(capsys, "oracle", check, "--space", files["c3"], "--map", files["map"])
    assert code == 0 and json.loads(out)["ok"]


def test_oracle_sober_and_missing_map(capsys, files):
    assert run(capsys, "oracle", "sober", "--space", files["c3"])[0] == 0
    assert run(capsys, "oracle", "essential", "--space", files["c3"])[0] == 2


def test_space_commands(capsys, files):
    code, out, _ = run(capsys, "space", "build", files["c3"])
    assert code == 0 and json.loads(out)["points"] == 3
    cop = write(files["tmp"], "c3c.json", json.loads(out)["copresentation"])
    assert json.loads(run(capsys, "space", "product", cop, cop)[1])["points"] == 9
    assert json.loads(run(capsys, "space", "union", cop, cop)[1])["points"] == 6
    assert json.loads(run(capsys, "space", "lift", cop)[1])["points"] == 4
    code, out, _ = run(capsys, "space", "reals")
    assert code == 0 and json.loads(out)["copresentation"]["indices"] == "countable"


def test_point_check(capsys):
    code, out, _ = run(capsys, "point", "check", "--space", "reals", "--stream", "real:sqrt2")
    assert code == 0 and json.loads(out)["counts"]["violated"] == 0
    assert run(capsys, "point", "check", "--space", "completion", "--stream", "grid:21")[0] == 0
    code, out, _ = run(capsys, "point", "check", "--space", "reals", "--stream",
                       'list:[["L", "1/2"], ["R", "1/2"]]', "--fuel", "10")
    assert code == 1 and json.loads(out)["counts"]["violated"] >= 1


def test_posite_commands(capsys, files):
    assert run(capsys, "posite", "check", "--input", files["vee"])[0] == 0
    out = json.loads(run(capsys, "posite", "spaces", "--input", files["vee"])[1])
    assert out["prime_filters"] == 2
    code, out, _ = run(capsys, "posite", "generic", "--input", files["vee"],
                       "--coideal", "top", "b", "--w", "top")
    assert code == 0 and json.loads(out)["filter"] == ["top", "b"]
    assert run(capsys, "posite", "from-copres", "--input", files["c3"])[0] == 0


def test_powerspace_command(capsys, files):
    code, out, _ = run(capsys, "powerspace", "--space", files["c3"], "--down",
                       "--embed-openmap", files["map"])
    data = json.loads(out)
    assert code == 0 and data["down"]["agree"] and data["open_surjection"]["equal"]


def test_game_play(capsys, files):
    code, out, _ = run(capsys, "game", "play", "--space", files["c3"], "--rounds", "10")
    assert code == 0 and json.loads(out)["winner_convergent"] == "II-wins"
    rels = write(files["tmp"], "rels.json", [[["1"], ["1"]]])
    om = write(files["tmp"], "om.json", {"source": chain(3).to_json(),
                                         "target": sierpinski().to_json(),
                                         "graph": {"0": 0, "1": 0, "2": 1}})
    for spec in ("normalize(product(finite, finite:%s))" % files["c3"],
                 "pi02(%s, finite)" % rels, "open-image(%s, finite)" % om):
        code, out, _ = run(capsys, "game", "play", "--space", files["s"], "--ii", spec,
                           "--i", "random:3", "--rounds", "15")
        assert code == 0, spec
        assert json.loads(out)["winner_strong"] == "II-wins"


def test_game_bad_specs(capsys, files):
    assert run(capsys, "game", "play", "--space", files["s"], "--ii", "bogus(")[0] == 2
    assert run(capsys, "game", "play", "--space", files["s"], "--i", "constant:7")[0] == 2

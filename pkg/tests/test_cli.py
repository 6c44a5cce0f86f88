"""Driver behavior: subcommands, exit codes, output stability."""

import json
from pathlib import Path

from polyeff.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_accepts_the_encodings_file(capsys):
    code, out, _ = run(capsys, "check", str(DATA / "encodings.pe"))
    assert code == 0
    assert "0 error(s)" in out


def test_check_rejects_stoup_misuse(capsys):
    code, out, _ = run(capsys, "check", str(DATA / "stoup_misuse.pe"))
    assert code == 1
    assert "StoupViolation" in out


def test_check_accepts_handler_signatures(capsys):
    code, out, _ = run(capsys, "check", str(DATA / "handler.pe"))
    assert code == 0


def test_check_json_diagnostics(capsys):
    code, out, _ = run(capsys, "check", "--format", "json", str(DATA / "stoup_misuse.pe"))
    assert code == 1
    payload = json.loads(out.strip())
    assert payload["errors"][0]["code"] == "StoupViolation"
    assert "span" in payload["errors"][0]


def test_elaborate_prints_kernel_declarations(capsys):
    code, out, _ = run(capsys, "elaborate", str(DATA / "handler.pe"))
    assert code == 0
    assert "def handler" in out
    assert "!" not in out  # sugar is gone


def test_eval_identity(capsys):
    code, out, _ = run(capsys, "eval", "fun x:2 => x")
    assert code == 0
    assert "value:" in out


def test_eval_monadic_value_in_free_model(capsys):
    # T(1) = 1 + |E|, so [[!1]] has two points
    code, out, _ = run(
        capsys, "eval", "bang (Fun X => fun u:X => u)", "--include-free-algebras"
    )
    assert code == 0
    assert "of 2" in out


def test_eval_choice_is_the_join(capsys):
    code, out, _ = run(
        capsys, "--monad", "powerset", "--include-free-algebras", "--format", "json",
        "eval", "or",
    )
    assert code == 0
    payload = json.loads(out.strip())
    assert payload["type"] == "forall ^X. ^X -> ^X -> ^X"


def test_eval_type_error_exit_code(capsys):
    code, _, err = run(capsys, "eval", "fun x:B => x x")
    assert code == 1


def test_eval_syntax_error_exit_code(capsys):
    code, _, err = run(capsys, "eval", "fun x:")
    assert code == 2


def test_verify_suite_text(capsys):
    code, out, _ = run(capsys, "verify", "bang-cardinality")
    assert code == 0
    assert "bang-cardinality: verified" in out


def test_verify_json_is_byte_stable(capsys):
    code1, out1, _ = run(capsys, "--format", "json", "--seed", "5", "verify", "metatheory")
    code2, out2, _ = run(capsys, "--format", "json", "--seed", "5", "verify", "metatheory")
    assert code1 == code2 == 0
    assert out1 == out2
    for line in out1.strip().splitlines():
        json.loads(line)


def test_verify_unknown_suite_is_usage_error(capsys):
    assert main(["verify", "nonsense"]) == 2


def test_config_file_roundtrip(tmp_path, capsys):
    cfg = tmp_path / "model.json"
    cfg.write_text('{"monad": "exception", "E": ["e"], "bound": 2, "include-free-algebras": true}')
    code, out, _ = run(capsys, "--config", str(cfg), "eval", "raise^e")
    assert code == 0
    assert "forall ^X. ^X" in out


def test_out_of_bound_exit_code(capsys):
    # an unregistered free algebra makes the monadic constant unavailable
    code, _, err = run(capsys, "eval", "handle^e")
    assert code == 3


def test_eval_application_returns_the_argument(capsys):
    tt = ("Fun X => fun f:(forall Y. Y -> Y) -> X => "
          "fun g:(forall Y. Y -> Y) -> X => f (Fun Y => fun y:Y => y)")
    code1, out1, _ = run(capsys, "--format", "json", "eval", tt)
    code2, out2, _ = run(capsys, "--format", "json", "eval", f"(fun b:2 => b) ({tt})")
    assert code1 == code2 == 0
    assert json.loads(out1)["value"] == json.loads(out2)["value"]

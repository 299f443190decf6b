"""Unit tests for the bundled fragment solver, driven over hand-written
scripts with independently known answers."""

import subprocess
import sys

import pytest

from plift.smtsolve import FragmentError, Solver, solve_script

PEN_STYLE = """
(declare-const PushToOpen Bool)
(declare-const TwistToOpen Bool)
(assert (=> TwistToOpen (not PushToOpen)))
(assert (=> PushToOpen (not TwistToOpen)))
(assert (or PushToOpen TwistToOpen))
(declare-datatypes () ((Part BasePen PushButton TwistableHead NONE_Part)))
(declare-fun selected_Part (Part) Bool)
(assert (= (selected_Part BasePen) true))
(assert (= (selected_Part PushButton) PushToOpen))
(assert (= (selected_Part TwistableHead) TwistToOpen))
(assert (= (selected_Part NONE_Part) false))
(declare-datatypes () ((Product Pen NONE_Product)))
(declare-fun Product_parts (Product) (Seq Part))
(assert (= (Product_parts Pen) (seq.++
  (ite (selected_Part BasePen) (seq.unit BasePen)
       (as seq.empty (Seq Part)))
  (ite (selected_Part PushButton) (seq.unit PushButton)
       (as seq.empty (Seq Part)))
  (ite (selected_Part TwistableHead) (seq.unit TwistableHead)
       (as seq.empty (Seq Part))))))
(assert (= (Product_parts NONE_Product) (as seq.empty (Seq Part))))
"""


def outcome(text):
    lines = [ln for ln in solve_script(text).splitlines() if ln.strip()]
    return lines


def test_trivial_sat_and_model_shape():
    out = solve_script("(declare-const x Bool)(assert x)"
                       "(check-sat)(get-model)")
    assert out.splitlines()[0] == "sat"
    assert "(define-fun x () Bool" in out
    assert "true)" in out


def test_trivial_unsat_and_model_error():
    out = solve_script("(declare-const x Bool)(assert x)(assert (not x))"
                       "(check-sat)(get-model)")
    lines = out.splitlines()
    assert lines[0] == "unsat"
    assert lines[1] == '(error "model is not available")'


def test_lexicographically_first_model():
    # b alone satisfies (or a b); {a false, b true} precedes {a true, ...}
    out = solve_script("(declare-const a Bool)(declare-const b Bool)"
                       "(assert (or a b))(check-sat)(get-model)")
    assert "(define-fun a () Bool\n    false)" in out
    assert "(define-fun b () Bool\n    true)" in out


def test_quantifier_over_enum_unsat():
    # every part is selected under PushToOpen=..., contradiction crafted
    text = PEN_STYLE + """
(assert (exists ((p Part)) (and (selected_Part p)
    (not (seq.contains (Product_parts Pen) (seq.unit p))))))
(check-sat)
"""
    # every selected part is in the pen's list, so no witness exists
    assert outcome(text) == ["unsat"]


def test_quantifier_over_enum_sat_with_expected_model():
    text = PEN_STYLE + """
(assert (exists ((p Part)) (and (selected_Part p) (= p TwistableHead))))
(check-sat)
(get-model)
"""
    lines = outcome(text)
    assert lines[0] == "sat"
    body = "\n".join(lines)
    assert "TwistToOpen" in body
    assert "(define-fun TwistToOpen () Bool\n    true)" in "\n".join(
        solve_script(text).splitlines())


def test_seq_len_counts_selected_elements():
    text = PEN_STYLE + """
(assert (= (seq.len (Product_parts Pen)) 3))
(check-sat)
"""
    # both mechanisms can never be selected together -> never 3 parts
    assert outcome(text) == ["unsat"]
    text2 = PEN_STYLE + """
(assert (= (seq.len (Product_parts Pen)) 2))
(check-sat)
"""
    assert outcome(text2) == ["sat"]


def test_forall_with_implication_guard():
    text = PEN_STYLE + """
(assert (forall ((p Part)) (=> (selected_Part p)
    (seq.contains (Product_parts Pen) (seq.unit p)))))
(check-sat)
"""
    assert outcome(text) == ["sat"]


def test_string_and_int_functions():
    text = """
(declare-const f Bool)
(declare-datatypes () ((T A B NONE_T)))
(declare-fun name (T) String)
(declare-fun level (T) Int)
(assert (= (name A) "hello"))
(assert (= (name B) "world"))
(assert (= (name NONE_T) ""))
(assert (= (level A) 3))
(assert (= (level B) (- 2)))
(assert (= (level NONE_T) 0))
(assert (= f (and (= (name A) "hello") (< (level B) (level A)))))
(assert f)
(check-sat)
"""
    assert outcome(text) == ["sat"]


def test_ite_binding_on_references():
    text = """
(declare-const sel Bool)
(declare-datatypes () ((S Step NONE_S)))
(declare-fun selected_S (S) Bool)
(assert (= (selected_S Step) sel))
(assert (= (selected_S NONE_S) false))
(declare-datatypes () ((D Depl NONE_D)))
(declare-fun D_step (D) S)
(assert (= (D_step Depl) (ite (selected_S Step) Step NONE_S)))
(assert (= (D_step NONE_D) NONE_S))
(assert (= (D_step Depl) NONE_S))
(check-sat)
(get-model)
"""
    out = solve_script(text)
    assert out.splitlines()[0] == "sat"
    assert "(define-fun sel () Bool\n    false)" in out


def test_underdefined_function_rejected():
    text = """
(declare-datatypes () ((T A NONE_T)))
(declare-fun f (T) Int)
(assert (= (f A) 1))
(assert (> (f NONE_T) 0))
(check-sat)
"""
    with pytest.raises(FragmentError, match="no defining assert"):
        Solver().run(text)


def test_non_bool_constant_rejected():
    with pytest.raises(FragmentError, match="only Bool"):
        Solver().run("(declare-const n Int)(check-sat)")


def test_unknown_symbol_rejected():
    with pytest.raises(FragmentError, match="unknown symbol"):
        Solver().run("(assert ghost)(check-sat)")


def test_circular_definition_rejected():
    text = """
(declare-datatypes () ((T A NONE_T)))
(declare-fun f (T) Int)
(declare-fun g (T) Int)
(assert (= (f A) (g A)))
(assert (= (g A) (f A)))
(assert (= (f NONE_T) 0))
(assert (= (g NONE_T) 0))
(assert (= (f A) 0))
(check-sat)
"""
    with pytest.raises(FragmentError, match="circular"):
        Solver().run(text)


def test_duplicate_definition_becomes_goal():
    # the second equation for (f A) must be checked, not ignored
    text = """
(declare-const x Bool)
(declare-datatypes () ((T A NONE_T)))
(declare-fun f (T) Int)
(assert (= (f A) 1))
(assert (= (f NONE_T) 0))
(assert (= (f A) 2))
(check-sat)
"""
    assert outcome(text) == ["unsat"]


def test_many_variables_dpll_path():
    n = 24  # beyond the scan limit, forcing the DPLL route
    decls = "".join(f"(declare-const v{i} Bool)" for i in range(n))
    chain = "".join(f"(assert (=> v{i} v{i+1}))" for i in range(n - 1))
    text = decls + chain + f"(assert v0)(check-sat)(get-model)"
    out = solve_script(text)
    assert out.splitlines()[0] == "sat"
    # v0 forces the whole chain true
    assert out.count("true)") == n


def test_dpll_unsat():
    n = 24
    decls = "".join(f"(declare-const v{i} Bool)" for i in range(n))
    text = decls + "(assert v0)(assert (=> v0 v1))(assert (not v1))(check-sat)"
    assert outcome(text) == ["unsat"]


def test_echo_and_exit():
    out = solve_script('(echo "hello")(exit)(check-sat)')
    assert out == "hello\n"


def test_set_commands_ignored():
    out = solve_script("(set-logic ALL)(set-option :produce-models true)"
                       "(set-info :status sat)(check-sat)")
    assert out.strip() == "sat"


def test_main_reads_stdin_and_reports_errors():
    ok = subprocess.run([sys.executable, "-m", "plift.smtsolve"],
                        input="(check-sat)", text=True, capture_output=True)
    assert ok.returncode == 0
    assert ok.stdout.strip() == "sat"
    bad = subprocess.run([sys.executable, "-m", "plift.smtsolve"],
                         input="(push)(check-sat)", text=True,
                         capture_output=True)
    assert bad.returncode == 1
    assert bad.stdout.startswith('(error "')

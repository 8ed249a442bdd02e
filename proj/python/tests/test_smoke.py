import math
import os
import pathlib
from fractions import Fraction

import numpy as np
import pytest

import kleinkit
from kleinkit import Algebra, q

SCRIPTS = pathlib.Path(os.environ.get("KLEINKIT_SCRIPTS_DIR", pathlib.Path(__file__).parents[2] / "scripts"))


def abnormal_pair():
    return Algebra([("a", "boson"), ("b", "boson")], q=-1, exchange={("a", "b"): -1})


def test_canonical_commutator():
    alg = Algebra([("a", "boson")])
    a, ad = alg.ann("a"), alg.cre("a")
    assert (a * ad - ad * a - 1).is_zero()
    assert str(a * ad) == "1 + ad[a]*a[a]"
    assert (a**3 * ad**3).vev() == 6


def test_parity_dressing_commutes():
    alg = abnormal_pair()
    a = alg.ann("a")
    bt = alg.dressed_ann("total-parity-on-b", "b")
    assert alg.bracket(a, bt).is_zero()
    assert alg.bracket(a, bt.adjoint()).is_zero()
    assert (alg.bracket(bt, bt.adjoint()) - 1).is_zero()
    assert str(alg.phase({"a": 1, "b": 1}) * alg.cre("b")) == "(-1)*ad[b]*phase[1,1]"
    report = alg.verify_map("total-parity-on-b", expected=1)
    assert report["all_pass"] and report["failures"] == 0


def test_formal_q_dressing():
    alg = Algebra([("a", "boson"), ("b", "boson")])
    report = alg.verify_map("q-total-on-b")
    assert report["all_pass"]
    assert report["induced"][("a", "b")] == "q"
    at = alg.dressed_ann("q-total-on-b", "a")
    bt = alg.dressed_ann("q-total-on-b", "b")
    assert alg.bracket(at, bt, q).is_zero()
    assert not alg.bracket(at, bt).is_zero()


def test_scalars():
    x = Fraction(3, 2) * q**-1 + 1j * q**2
    assert str(x) == "3/2*q^-1 + (0,1)*q^2"
    assert x.conj().conj() == x
    assert abs(q.eval(math.pi) + 1) == 0


def test_numeric_truncation_contract():
    alg = Algebra([("a", "boson")])
    a, ad = alg.ann("a"), alg.cre("a")
    m = alg.matrix(a, dim=4)
    assert np.allclose(np.diag(m, 1), np.sqrt([1, 2, 3]))
    raw = alg.matrix(a, 4) @ alg.matrix(ad, 4) - alg.matrix(ad, 4) @ alg.matrix(a, 4) - np.eye(4)
    assert np.allclose(np.diag(raw), [0, 0, 0, -4])
    res = alg.check_zero(a * ad - ad * a - 1, dim=4, theta=math.pi)
    assert res["pass"] and res["norm"] == "frobenius"


def test_errors():
    with pytest.raises(kleinkit.KleinkitError):
        Algebra([("a", "boson")]).ann("zz")
    with pytest.raises(kleinkit.KleinkitError):
        Algebra([("a", "quark")])
    with pytest.raises(kleinkit.KleinkitError):
        Algebra([("a", "boson")], q=2)


def test_catalog():
    names = [n for n, _ in kleinkit.list_maps()]
    assert "charge-parity" in names and "q-cascade" in names


def test_check_script_reports():
    ok = kleinkit.check_script((SCRIPTS / "klein_eq5.kq").read_text(), name="klein_eq5.kq")
    assert ok["exit_code"] == 0 and ok["summary"] == {"passed": 6, "failed": 0}
    bad = kleinkit.check_script((SCRIPTS / "failing.kq").read_text())
    assert bad["exit_code"] == 1
    assert bad["assertions"][0]["line"] == 3 and bad["assertions"][0]["witness"] == "1"
    err = kleinkit.check_script("mode c boson;\nlet x = ann(c")
    assert err["exit_code"] == 2 and err["error"]["line"] == 2

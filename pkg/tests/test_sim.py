import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simll.bench import parse_bench
from simll.locking import simll_lock
from simll.sim import (
    EXHAUSTIVE_INPUT_LIMIT,
    CorruptionReport,
    KeyGuess,
    SimulationError,
    ac_pc,
    corruption,
    equivalence_check,
    evaluate_guess,
    exhaustive_patterns,
    fc,
    hd,
    random_patterns,
    resolve_x,
    simulate,
    simulate_packed,
)

from conftest import random_netlist


def c17_truth(i1, i2, i3, i6, i7):
    """Hand-derived c17 output functions, written from the gate equations."""
    n10 = 1 - (i1 and i3)
    n11 = 1 - (i3 and i6)
    n16 = 1 - (i2 and n11)
    n19 = 1 - (n11 and i7)
    out22 = 1 - (n10 and n16)
    out23 = 1 - (n16 and n19)
    return out22, out23


def test_simulate_matches_hand_truth_table(c17):
    for v in range(32):
        bits = [(v >> k) & 1 for k in range(5)]
        assign = dict(zip(("1", "2", "3", "6", "7"), bits))
        got = simulate(c17, assign)
        want22, want23 = c17_truth(*bits)
        assert got == {"22": want22, "23": want23}, assign


def test_simulate_requires_complete_assignment(c17):
    with pytest.raises(SimulationError, match="no value for input"):
        simulate(c17, {"1": 0, "2": 0, "3": 0, "6": 0})
    with pytest.raises(SimulationError, match="does not fit"):
        simulate(c17, {"1": 2, "2": 0, "3": 0, "6": 0, "7": 0})


def test_all_gate_kinds_scalar():
    n = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(s)\n"
        "OUTPUT(t_and)\nOUTPUT(t_nand)\nOUTPUT(t_or)\nOUTPUT(t_nor)\n"
        "OUTPUT(t_xor)\nOUTPUT(t_xnor)\nOUTPUT(t_not)\nOUTPUT(t_buf)\nOUTPUT(t_mux)\n"
        "t_and = AND(a, b)\nt_nand = NAND(a, b)\nt_or = OR(a, b)\n"
        "t_nor = NOR(a, b)\nt_xor = XOR(a, b)\nt_xnor = XNOR(a, b)\n"
        "t_not = NOT(a)\nt_buf = BUF(a)\nt_mux = MUX(s, a, b)\n"
    )
    for a in (0, 1):
        for b in (0, 1):
            for s in (0, 1):
                got = simulate(n, {"a": a, "b": b, "s": s})
                assert got["t_and"] == (a & b)
                assert got["t_nand"] == 1 - (a & b)
                assert got["t_or"] == (a | b)
                assert got["t_nor"] == 1 - (a | b)
                assert got["t_xor"] == a ^ b
                assert got["t_xnor"] == 1 - (a ^ b)
                assert got["t_not"] == 1 - a
                assert got["t_buf"] == a
                assert got["t_mux"] == (b if s else a)


@pytest.mark.parametrize("seed", range(8))
def test_packed_agrees_with_scalar(seed):
    n = random_netlist(seed, allow_mux=True)
    pats = random_patterns(n.inputs, 1000, seed=seed + 100)
    packed = simulate_packed(n, pats.columns, pats.count)
    for j in range(0, pats.count, 37):
        scalar = simulate(n, pats.pattern(j))
        for o in n.outputs:
            assert (packed[o] >> j) & 1 == scalar[o], (seed, j, o)


def test_exhaustive_patterns_enumerate_every_vector():
    pats = exhaustive_patterns(("a", "b", "c"))
    assert pats.count == 8
    seen = {tuple(pats.pattern(j)[x] for x in "abc") for j in range(8)}
    assert seen == {(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)}
    assert pats.kind == "exhaustive"


def test_exhaustive_patterns_limit():
    names = tuple(f"i{k}" for k in range(EXHAUSTIVE_INPUT_LIMIT + 1))
    with pytest.raises(SimulationError, match="exhaustive limit"):
        exhaustive_patterns(names)


def test_random_patterns_reproducible_and_validated():
    a = random_patterns(("x", "y"), 64, seed=5)
    b = random_patterns(("x", "y"), 64, seed=5)
    c = random_patterns(("x", "y"), 64, seed=6)
    assert a.columns == b.columns
    assert a.columns != c.columns
    assert a.count == 64 and a.kind == "random" and a.seed == 5
    with pytest.raises(SimulationError):
        random_patterns(("x",), 0, seed=1)


def test_pattern_scalar_view_bounds():
    pats = random_patterns(("x",), 4, seed=0)
    with pytest.raises(IndexError):
        pats.pattern(4)
    with pytest.raises(IndexError):
        pats.pattern(-1)


# ---------------------------------------------------------------------------
# corruption metrics
# ---------------------------------------------------------------------------


def xor_lock_pair():
    """Locked twin of a tiny circuit where the wrong key inverts output q."""
    oracle = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(q)\nOUTPUT(r)\nq = AND(a, b)\nr = OR(a, b)\n")
    locked = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(keyinput0)\nOUTPUT(q)\nOUTPUT(r)\n"
        "w = AND(a, b)\nq = XNOR(w, keyinput0)\nr = OR(a, b)\n"
    )
    return oracle, locked


def test_corruption_exact_counts():
    oracle, locked = xor_lock_pair()
    pats = exhaustive_patterns(("a", "b"))
    good = corruption(oracle, locked, {"keyinput0": 1}, pats)
    assert good == CorruptionReport(0.0, 0.0, 0.0, 4, 2)
    # wrong key inverts q on all 4 patterns, r never differs
    badr = corruption(oracle, locked, {"keyinput0": 0}, pats)
    assert badr.fc == 1.0
    assert badr.hd_raw == 1.0
    assert badr.hd_pct == 50.0


def test_corruption_chunking_invariance(monkeypatch):
    import simll.sim as sim_mod

    oracle, locked = xor_lock_pair()
    pats = random_patterns(("a", "b"), 1000, seed=3)
    whole = corruption(oracle, locked, {"keyinput0": 0}, pats)
    monkeypatch.setattr(sim_mod, "_CHUNK", 7)
    chopped = corruption(oracle, locked, {"keyinput0": 0}, pats)
    assert whole == chopped


def test_corruption_interface_checks():
    oracle, locked = xor_lock_pair()
    pats = exhaustive_patterns(("a", "b"))
    with pytest.raises(SimulationError, match="missing bit"):
        corruption(oracle, locked, {}, pats)
    with pytest.raises(SimulationError, match="must not have key inputs"):
        corruption(locked, locked, {"keyinput0": 1}, pats)
    swapped = parse_bench("INPUT(b)\nINPUT(a)\nOUTPUT(q)\nOUTPUT(r)\nq = AND(a, b)\nr = OR(a, b)\n")
    with pytest.raises(SimulationError, match="primary input"):
        corruption(swapped, locked, {"keyinput0": 1}, pats)
    bad_pats = exhaustive_patterns(("a",))
    with pytest.raises(SimulationError, match="cover"):
        corruption(oracle, locked, {"keyinput0": 1}, bad_pats)


def test_fc_hd_shortcuts_match_corruption():
    oracle, locked = xor_lock_pair()
    pats = random_patterns(("a", "b"), 512, seed=9)
    rep = corruption(oracle, locked, {"keyinput0": 0}, pats)
    assert fc(oracle, locked, {"keyinput0": 0}, pats) == rep.fc
    assert hd(oracle, locked, {"keyinput0": 0}, pats) == (rep.hd_raw, rep.hd_pct)


@pytest.mark.parametrize("seed", range(5))
def test_fc_hd_inequality_chain(seed, gen432):
    ld = simll_lock(gen432, key_size=16, hops=2, seed=seed)
    rng = random.Random(0xC0FFEE + seed)
    key = {k: rng.getrandbits(1) for k in ld.netlist.key_inputs}
    pats = random_patterns(gen432.inputs, 2000, seed=seed)
    rep = corruption(gen432, ld.netlist, key, pats)
    m = len(gen432.outputs)
    assert rep.fc <= rep.hd_raw + 1e-12
    assert rep.hd_raw <= rep.fc * m + 1e-12


# ---------------------------------------------------------------------------
# guess metrics
# ---------------------------------------------------------------------------


def test_ac_pc_all_x():
    guess = KeyGuess((None,) * 64)
    assert ac_pc(guess, [0] * 64) == (0.0, 100.0)


def test_ac_pc_worked_example():
    # 33 correct, 20 undecided, 11 wrong out of 64
    truth = [1] * 64
    bits = tuple([1] * 33 + [None] * 20 + [0] * 11)
    ac, pc = ac_pc(KeyGuess(bits), truth)
    assert ac == pytest.approx(51.5625)
    assert pc == pytest.approx(82.8125)


def test_ac_pc_validates_shapes():
    with pytest.raises(SimulationError):
        ac_pc(KeyGuess((1, 0)), [1])
    with pytest.raises(SimulationError):
        ac_pc(KeyGuess(()), [])


@given(
    st.lists(st.sampled_from([0, 1, None]), min_size=1, max_size=80).flatmap(
        lambda bits: st.tuples(
            st.just(bits),
            st.lists(st.integers(0, 1), min_size=len(bits), max_size=len(bits)),
        )
    )
)
@settings(max_examples=80, deadline=None)
def test_ac_pc_counting_definition(case):
    bits, truth = case
    ac, pc = ac_pc(KeyGuess(tuple(bits)), truth)
    n = len(truth)
    correct = sum(1 for g, t in zip(bits, truth) if g == t and g is not None)
    x = sum(1 for g in bits if g is None)
    assert ac == pytest.approx(correct / n * 100)
    assert pc == pytest.approx((correct + x) / n * 100)
    assert 0.0 <= ac <= pc <= 100.0


def test_resolve_x_only_touches_x_bits():
    guess = KeyGuess((1, None, 0, None))
    out = resolve_x(guess, seed=2)
    assert out.bits[0] == 1 and out.bits[2] == 0
    assert all(b in (0, 1) for b in out.bits)
    assert resolve_x(guess, seed=2) == out  # deterministic


def test_key_guess_counters():
    g = KeyGuess((1, 0, None, 1, None))
    assert len(g) == 5 and g.n_decided == 3 and g.n_x == 2


# ---------------------------------------------------------------------------
# equivalence checking
# ---------------------------------------------------------------------------


def test_equivalence_exhaustive_pass_and_fail():
    oracle, locked = xor_lock_pair()
    good = equivalence_check(oracle, locked, {"keyinput0": 1})
    assert good and good.mode == "exhaustive" and good.n_patterns == 4
    bad = equivalence_check(oracle, locked, {"keyinput0": 0})
    assert not bad
    assert bad.counterexample is not None
    assert bad.mismatched_outputs == ("q",)
    # the counterexample replays: outputs really differ on that pattern
    cex = bad.counterexample
    ref = simulate(oracle, cex)
    dut = simulate(locked, {**cex, "keyinput0": 0})
    assert any(ref[o] != dut[o] for o in oracle.outputs)
    assert ref["q"] != dut["q"]


def test_equivalence_random_mode(gen432):
    ld = simll_lock(gen432, key_size=8, hops=2, seed=0)
    v = equivalence_check(gen432, ld.netlist, ld.key_assignment(), n_random=500)
    assert v and v.mode == "random" and v.n_patterns == 500


def test_equivalence_random_mode_detects_wrong_key(gen432):
    ld = simll_lock(gen432, key_size=8, hops=2, seed=0)
    wrong = {k: v ^ 1 for k, v in ld.key_assignment().items()}
    v = equivalence_check(gen432, ld.netlist, wrong, n_random=4000)
    assert not v
    assert v.counterexample is not None and v.mismatched_outputs
    cex = dict(v.counterexample)
    ref = simulate(gen432, cex)
    dut = simulate(ld.netlist, {**cex, **wrong})
    assert [o for o in gen432.outputs if ref[o] != dut[o]] == list(v.mismatched_outputs)


# ---------------------------------------------------------------------------
# evaluate_guess
# ---------------------------------------------------------------------------


def test_evaluate_guess_correct_key(gen499):
    ld = simll_lock(gen499, key_size=16, hops=2, seed=1)
    truth = [ld.key_assignment()[k] for k in ld.netlist.key_inputs]
    rep = evaluate_guess(gen499, ld.netlist, truth, KeyGuess(tuple(truth)), n_patterns=500)
    assert rep.ac == 100.0 and rep.pc == 100.0
    assert rep.fc_avg == 0.0 and rep.hd_raw_avg == 0.0
    assert rep.n_resolutions == 1  # no X bits, one round suffices


def test_evaluate_guess_x_rounds_and_threads(gen499):
    ld = simll_lock(gen499, key_size=16, hops=2, seed=1)
    truth = [ld.key_assignment()[k] for k in ld.netlist.key_inputs]
    bits = tuple(b if i % 2 else None for i, b in enumerate(truth))
    one = evaluate_guess(
        gen499, ld.netlist, truth, KeyGuess(bits), n_patterns=300, n_resolutions=4
    )
    two = evaluate_guess(
        gen499,
        ld.netlist,
        truth,
        KeyGuess(bits),
        n_patterns=300,
        n_resolutions=4,
        threads=2,
    )
    assert one == two  # worker count never changes results
    assert one.n_resolutions == 4
    assert one.n_x == len(truth) // 2


def test_evaluate_guess_report_text(gen499):
    ld = simll_lock(gen499, key_size=8, hops=2, seed=0)
    truth = [ld.key_assignment()[k] for k in ld.netlist.key_inputs]
    rep = evaluate_guess(gen499, ld.netlist, truth, KeyGuess(tuple(truth)), n_patterns=200)
    kv = rep.to_kv()
    assert "ac=100.0000" in kv and kv.endswith("\n")
    assert dict(line.split("=", 1) for line in kv.strip().splitlines())["key_size"] == "8"
    table = rep.to_table()
    assert "key_size" in table and table.count("-") >= 10

import pytest

from cantorgames.bobs import GreedyFixed, PassAlice, PassBob, Scripted
from cantorgames.cantor import ClopenSet
from cantorgames.dyadic import Dyadic, ZERO
from cantorgames.referee import (
    AliceMove,
    BobMove,
    BudgetExceeded,
    DisjointnessBroken,
    GameConfig,
    GameState,
    RestrictionViolated,
    SymmetryBroken,
    WeightDecreased,
    read_trace,
    replay,
    run_match,
    verify_trace,
    write_trace,
)

D = Dyadic.parse


def fresh(kind="nonbipartite", d="1/2", c="1", **kw):
    return GameState(GameConfig(kind=kind, d=D(d), c=D(c), **kw))


# -- Alice move checks ------------------------------------------------------------

def test_single_request_accepted():
    s = fresh()
    s.apply_alice_move([(("u", "v"), D("1/4"))])
    assert s.weight("u", "v") == D("1/4")
    assert s.load("u") == D("1/4")


def test_budget_exceeded_names_vertex():
    s = fresh()
    with pytest.raises(BudgetExceeded) as e:
        s.apply_alice_move([(("u", "v"), D("1/4")), (("u", "w"), D("1/2"))])
    assert e.value.vertex == "u"
    assert s.weight("u", "v") == ZERO  # atomic: nothing committed


def test_weight_decrease_rejected():
    s = fresh()
    s.apply_alice_move([(("u", "v"), D("1/4"))])
    with pytest.raises(WeightDecreased):
        s.apply_alice_move([(("u", "v"), D("1/8"))])


def test_symmetric_edge_key_and_conflict():
    s = fresh()
    s.apply_alice_move([(("v", "u"), D("1/8"))])
    assert s.weight("u", "v") == D("1/8")
    with pytest.raises(SymmetryBroken):
        s.apply_alice_move([(("u", "v"), D("1/4")), (("v", "u"), D("1/2"))])


def test_restricted_size_window():
    s = fresh(kind="restricted", d="1/128", n=16, p=6)
    u, v = "0" * 16, "1" * 16
    # 2^-10 > 16^-6 = 2^-24: above the ceiling
    with pytest.raises(RestrictionViolated):
        s.apply_alice_move([((u, v), Dyadic(1, 10))])
    # below the 2^-n floor
    with pytest.raises(RestrictionViolated):
        s.apply_alice_move([((u, v), Dyadic(1, 17))])
    with pytest.raises(RestrictionViolated):  # not an n-bit string
        s.apply_alice_move([(("01", v), Dyadic(1, 16))])


def test_restricted_raise_once_only():
    s = fresh(kind="restricted", d="1/128", n=32, p=6)
    u, v = "0" * 32, "1" * 32
    s.apply_alice_move([((u, v), Dyadic(1, 31))])
    with pytest.raises(RestrictionViolated):
        s.apply_alice_move([((u, v), Dyadic(1, 30))])


# -- Bob move checks ------------------------------------------------------------------

def test_disjointness_at_shared_vertex():
    s = fresh()
    s.apply_alice_move([(("u", "v"), D("1/4")), (("u", "w"), D("1/4"))])
    s.apply_bob_move([(("u", "v"), ClopenSet(["0"]))])
    with pytest.raises(DisjointnessBroken) as e:
        s.apply_bob_move([(("u", "w"), ClopenSet(["00"]))])
    assert e.value.vertex == "u"


def test_bipartite_column_disjointness():
    s = fresh(kind="bipartite", d="1")
    s.apply_alice_move([(("x", "y"), D("1/2")), (("x2", "y"), D("1/2"))])
    s.apply_bob_move([(("x", "y"), ClopenSet(["1"]))])
    with pytest.raises(DisjointnessBroken) as e:
        s.apply_bob_move([(("x2", "y"), ClopenSet(["1"]))])
    assert e.value.vertex == "y"


def test_bipartite_budgets_both_sides():
    s = fresh(kind="bipartite", d="1/2")
    s.apply_alice_move([(("x", "y"), D("1/4")), (("x", "y2"), D("1/4"))])
    with pytest.raises(BudgetExceeded):  # row at x full
        s.apply_alice_move([(("x", "y3"), D("1/4"))])
    # column budget: load y3 via two different left vertices
    s.apply_alice_move([(("x2", "y3"), D("1/2"))])
    with pytest.raises(BudgetExceeded) as e:
        s.apply_alice_move([(("x3", "y3"), D("1/4"))])
    assert e.value.vertex == "y3"


def test_label_growth_is_monotone_union():
    s = fresh()
    s.apply_alice_move([(("u", "v"), D("1/4"))])
    s.apply_bob_move([(("u", "v"), ClopenSet(["00"]))])
    s.apply_bob_move([(("u", "v"), ClopenSet(["00", "01"]))])  # re-adding own is fine
    assert s.label("u", "v") == ClopenSet(["0"])


# -- winning condition -------------------------------------------------------------------

def test_winning_status_nu_arithmetic():
    s = fresh(c="1")
    s.apply_alice_move([(("u", "v"), D("1/4"))])
    s.apply_bob_move([(("u", "v"), ClopenSet(["00"]))])
    assert s.winning_status()["all_satisfied"]

    s2 = fresh(c="1")
    s2.apply_alice_move([(("u", "v"), D("1/4"))])
    s2.apply_bob_move([(("u", "v"), ClopenSet(["001", "010"]))])
    rep = s2.winning_status()
    assert not rep["all_satisfied"]
    assert rep["edges"][("u", "v")]["nu"] == Dyadic(1, 3)


def test_winning_status_with_factor():
    s = fresh(c="1/2")
    s.apply_alice_move([(("u", "v"), D("1/2"))])
    s.apply_bob_move([(("u", "v"), ClopenSet(["00", "01"]))])  # nu = 1/2 >= 1/4
    assert s.winning_status()["all_satisfied"]


# -- matches and traces --------------------------------------------------------------------

def test_pass_pass_is_vacuous_bob_win():
    res = run_match(GameConfig(kind="nonbipartite", d=D("1/2"), max_moves=10),
                    PassAlice(), PassBob())
    assert res.winner == "bob" and res.reason == "stable"


def test_single_request_greedy_bob_wins():
    class OneShot(PassAlice):
        done = False

        def next_move(self, state):
            if not self.done:
                self.done = True
                return AliceMove([(("u", "v"), D("1/4"))])
            from cantorgames.referee import PASS_A

            return PASS_A

    res = run_match(GameConfig(kind="nonbipartite", d=D("1/2"), max_moves=20),
                    OneShot(), GreedyFixed())
    assert res.winner == "bob"
    assert res.summary["unsatisfied"] == 0


def test_bob_stalling_loses():
    class OneShot(PassAlice):
        done = False

        def next_move(self, state):
            if not self.done:
                self.done = True
                return AliceMove([(("u", "v"), D("1/4"))])
            from cantorgames.referee import PASS_A

            return PASS_A

    res = run_match(GameConfig(kind="nonbipartite", d=D("1/2"), max_moves=20),
                    OneShot(), PassBob())
    assert res.winner == "alice" and res.reason == "bob-stalled"


def test_trace_roundtrip_and_replay(tmp_path):
    config = GameConfig(kind="nonbipartite", d=D("1/2"), max_moves=40)
    res = run_match(config, _star_alice(), GreedyFixed())
    path = tmp_path / "t.trace"
    write_trace(path, config, res)
    cfg2, header, records = read_trace(path)
    state = replay(cfg2, records)
    assert state.digest() == res.final_digest
    report = verify_trace(path)
    assert report["records"] == len(res.records)

    # byte-identical rerun
    res2 = run_match(config, _star_alice(), GreedyFixed())
    path2 = tmp_path / "t2.trace"
    write_trace(path2, config, res2)
    assert path.read_bytes() == path2.read_bytes()


def test_tampered_trace_detected(tmp_path):
    config = GameConfig(kind="nonbipartite", d=D("1/2"), max_moves=40)
    res = run_match(config, _star_alice(), GreedyFixed())
    path = tmp_path / "t.trace"
    write_trace(path, config, res)
    lines = path.read_text().splitlines()
    # lower a recorded weight: replay must flag the mismatti... the violation
    bad = lines[1].replace("1/2^3", "1/2^1")
    (tmp_path / "bad.trace").write_text("\n".join([lines[0], bad] + lines[2:]) + "\n")
    with pytest.raises(Exception):
        verify_trace(tmp_path / "bad.trace")


def _star_alice():
    class Star(PassAlice):
        done = False

        def next_move(self, state):
            if not self.done:
                self.done = True
                return AliceMove(
                    [(("c", f"l{i}"), Dyadic(1, 3)) for i in range(4)]
                )
            from cantorgames.referee import PASS_A

            return PASS_A

    return Star()


def test_replay_detects_rule_violation_in_script():
    config = GameConfig(kind="nonbipartite", d=D("1/2"), max_moves=10)
    moves = [
        BobMove([(("u", "v"), ClopenSet(["0"]))]),
        BobMove([(("u", "w"), ClopenSet(["00"]))]),  # clashes at u
    ]

    class TwoRequests(PassAlice):
        k = 0

        def next_move(self, state):
            self.k += 1
            if self.k == 1:
                return AliceMove([(("u", "v"), D("1/4"))])
            if self.k == 2:
                return AliceMove([(("u", "w"), D("1/4"))])
            from cantorgames.referee import PASS_A

            return PASS_A

    res = run_match(config, TwoRequests(), Scripted(moves))
    assert res.winner == "alice"
    assert res.reason == "bob-violation:DisjointnessBroken"


# -- monotonicity / occupied-set consistency over a real match ---------------------------------

def test_monotone_and_occupied_consistency():
    config = GameConfig(kind="nonbipartite", d=D("1/2"), max_moves=60)
    state = GameState(config)
    alice, bob = _star_alice(), GreedyFixed()
    weights_seen: dict = {}
    for i in range(8):
        mover = alice if i % 2 == 0 else bob
        move = mover.next_move(state)
        if i % 2 == 0:
            state.apply_alice_move(move.increases)
        else:
            state.apply_bob_move(move.additions)
        for e, w in state.weights.items():
            assert weights_seen.get(e, ZERO) <= w
            weights_seen[e] = w
    for v in state.occupied:
        total = ZERO
        for e in state.edges_of(v):
            lab = state.labels.get(e)
            if lab:
                total = total + lab.measure()
        assert state.occupied_at(v).measure() == total

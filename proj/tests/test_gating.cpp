#include "lazylearn/errors.hpp"
#include "lazylearn/gating.hpp"
#include "lazylearn/rng.hpp"
#include "lazylearn/toy.hpp"

#include <doctest.h>

using namespace lazylearn;

TEST_CASE("decide: exhaustive truth table") {
    // (kind, prior remember state, correct/incorrect) -> update flag.
    SUBCASE("backprop always updates, even when correct") {
        UpdateGate g(GateKind::backprop, 4);
        CHECK(g.decide(0, 1, 1).update);
        CHECK(g.decide(0, 0, 1).update);
    }
    SUBCASE("pure lazy updates exactly on misclassification") {
        UpdateGate g(GateKind::pure_lazy, 4);
        CHECK_FALSE(g.decide(0, 1, 1).update);
        CHECK(g.decide(0, 0, 1).update);
        // No memory: the same sample correct again does not update.
        CHECK_FALSE(g.decide(0, 1, 1).update);
    }
    SUBCASE("lazy: not remembered + correct -> no update") {
        UpdateGate g(GateKind::lazy, 4);
        const auto d = g.decide(2, 1, 1);
        CHECK_FALSE(d.update);
        CHECK_FALSE(d.newly_remembered);
        CHECK_FALSE(g.is_remembered(2));
    }
    SUBCASE("lazy: not remembered + wrong -> remember and update now") {
        UpdateGate g(GateKind::lazy, 4);
        const auto d = g.decide(2, 0, 1);
        CHECK(d.update);
        CHECK(d.newly_remembered);
        CHECK(g.is_remembered(2));
        // Later correct visit still updates; remembering is permanent.
        const auto later = g.decide(2, 1, 1);
        CHECK(later.update);
        CHECK_FALSE(later.newly_remembered);
    }
    SUBCASE("lazy: remembered + wrong -> update, not newly remembered") {
        UpdateGate g(GateKind::lazy, 4);
        g.decide(1, 0, 1);
        const auto d = g.decide(1, 0, 1);
        CHECK(d.update);
        CHECK_FALSE(d.newly_remembered);
    }
    SUBCASE("lazy: out-of-range sample id") {
        UpdateGate g(GateKind::lazy, 4);
        CHECK_THROWS_AS(g.decide(4, 0, 1), invalid_input);
        CHECK_THROWS_AS(g.decide(-1, 0, 1), invalid_input);
    }
}

TEST_CASE("newly_remembered implies update") {
    auto eng = make_engine(8, 0);
    UpdateGate g(GateKind::lazy, 64);
    for (int i = 0; i < 1000; ++i) {
        const auto sid = static_cast<std::int64_t>(uniform_below(eng, 64));
        const int predicted = static_cast<int>(uniform_below(eng, 3));
        const int target = static_cast<int>(uniform_below(eng, 3));
        const auto d = g.decide(sid, predicted, target);
        if (d.newly_remembered) {
            CHECK(d.update);
        }
    }
}

TEST_CASE("remembered_fraction") {
    SUBCASE("all false is 0, all true is 1") {
        UpdateGate g(GateKind::lazy, 10);
        CHECK(g.remembered_fraction() == 0.0);
        UpdateGate full = UpdateGate::lazy_all_remembered(10);
        CHECK(full.remembered_fraction() == 1.0);
    }
    SUBCASE("non-lazy gates have no remember store") {
        UpdateGate g(GateKind::backprop, 10);
        CHECK_THROWS_AS(g.remembered_fraction(), state_error);
        UpdateGate p(GateKind::pure_lazy, 10);
        CHECK_THROWS_AS(p.remembered_ids(), state_error);
    }
    SUBCASE("monotone non-decreasing under any decision stream") {
        auto eng = make_engine(9, 0);
        UpdateGate g(GateKind::lazy, 32);
        double prev = g.remembered_fraction();
        for (int i = 0; i < 500; ++i) {
            g.decide(static_cast<std::int64_t>(uniform_below(eng, 32)),
                     static_cast<int>(uniform_below(eng, 2)),
                     static_cast<int>(uniform_below(eng, 2)));
            const double now = g.remembered_fraction();
            CHECK(now >= prev);
            prev = now;
        }
    }
}

TEST_CASE("lazy gate with everything remembered decides like backprop") {
    auto eng = make_engine(10, 0);
    UpdateGate full = UpdateGate::lazy_all_remembered(16);
    UpdateGate bp(GateKind::backprop, 16);
    for (int i = 0; i < 400; ++i) {
        const auto sid = static_cast<std::int64_t>(uniform_below(eng, 16));
        const int predicted = static_cast<int>(uniform_below(eng, 2));
        const int target = static_cast<int>(uniform_below(eng, 2));
        CHECK(full.decide(sid, predicted, target).update ==
              bp.decide(sid, predicted, target).update);
    }
}

TEST_CASE("export_coreset") {
    ToyTaskSpec spec;
    spec.n_per_class = 8;
    const Dataset data = make_two_clouds(spec);

    SUBCASE("empty remember set yields an empty, valid dataset") {
        UpdateGate g(GateKind::lazy, data.size());
        const Dataset core = export_coreset(g, data);
        CHECK(core.size() == 0);
        CHECK(core.n_classes == 2);
    }
    SUBCASE("remember {0, 5} exports those two samples with their ids") {
        UpdateGate g(GateKind::lazy, data.size());
        g.decide(0, 0, 1);
        g.decide(5, 0, 1);
        const Dataset core = export_coreset(g, data);
        CHECK(core.size() == 2);
        CHECK(core.sample_ids == std::vector<std::int64_t>{0, 5});
        CHECK(core.features.row(0) == data.features.row(0));
        CHECK(core.features.row(1) == data.features.row(5));
    }
    SUBCASE("non-lazy gate cannot export") {
        UpdateGate g(GateKind::backprop, data.size());
        CHECK_THROWS_AS(export_coreset(g, data), state_error);
    }
    SUBCASE("size mismatch is a consistency error") {
        UpdateGate g(GateKind::lazy, data.size() + 1);
        CHECK_THROWS_AS(export_coreset(g, data), consistency_error);
    }
}

TEST_CASE("gate kind names round-trip") {
    CHECK(gate_kind_from_string("backprop") == GateKind::backprop);
    CHECK(gate_kind_from_string("pure-lazy") == GateKind::pure_lazy);
    CHECK(gate_kind_from_string("lazy") == GateKind::lazy);
    CHECK(gate_kind_from_string(to_string(GateKind::pure_lazy)) == GateKind::pure_lazy);
    CHECK_THROWS_AS(gate_kind_from_string("eager"), invalid_input);
}

#include <algorithm>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "nim/meta/serialize.hpp"
#include "nim/ndf/checker.hpp"
#include "nim/ndf/parser.hpp"
#include "nim/ndf/printer.hpp"
#include "nim/transform/transform.hpp"
#include "oracles.hpp"
#include "workload.hpp"

using namespace nim;
using nimtest::Harness;
using nimtest::Rng;

namespace {

ndf::NdfModel parse_ok(const std::string& src) {
    auto r = ndf::parse(src);
    if (!r.model) throw std::runtime_error("parse failed: " + src);
    return *r.model;
}

const ndf::TypeDef& first_type(const ndf::NdfModel& m) { return m.types.front(); }

transform::ConcreteInstance room(const std::string& name) {
    transform::ConcreteInstance i;
    i.typeName = "Room";
    i.fields["roomName"] = Scalar(name);
    return i;
}

} // namespace

TEST(ToGeneric, RoomBecomesCategoryWithOneEntry) {
    auto m = parse_ok(nimtest::kRoomNdf);
    const Instant now = from_millis(1'700'000'000'000);
    auto c = transform::to_generic(first_type(m), room("R101"), now);
    EXPECT_EQ(c.name, "room");
    EXPECT_EQ(c.sourceType, "Room");
    ASSERT_EQ(c.children.size(), 1u);
    const meta::Entry* e = c.find_entry("roomName");
    ASSERT_NE(e, nullptr);
    ASSERT_EQ(e->values.size(), 1u);
    EXPECT_EQ(e->values[0].value, Scalar("R101"));
    EXPECT_EQ(e->values[0].timestamp, now);
    EXPECT_FALSE(e->values[0].expiry);
}

TEST(ToGeneric, ZeroFieldTypeGivesEmptyCategory) {
    auto m = parse_ok("Marker { }");
    transform::ConcreteInstance i;
    auto c = transform::to_generic(first_type(m), i, from_millis(0));
    EXPECT_EQ(c.name, "marker");
    EXPECT_TRUE(c.children.empty());
    EXPECT_EQ(transform::from_generic(first_type(m), c, from_millis(0)).fields.size(), 0u);
}

TEST(ToGeneric, AbsentValueGivesEmptyEntry) {
    auto m = parse_ok(nimtest::kAnotherRoomNdf);
    transform::ConcreteInstance i;
    i.fields["roomID"] = Scalar("B7");
    auto c = transform::to_generic(first_type(m), i, from_millis(5));
    ASSERT_NE(c.find_entry("surface"), nullptr);
    EXPECT_TRUE(c.find_entry("surface")->values.empty());
    auto back = transform::from_generic(first_type(m), c, from_millis(5));
    EXPECT_EQ(back.fields.at("surface"), std::nullopt);
    EXPECT_EQ(back.fields.at("roomID"), Scalar("B7"));
}

TEST(ToGeneric, NestedInstancesBecomeIndexedChildren) {
    auto m = parse_ok("Building { String name; Room { String roomName; } }");
    const auto& b = first_type(m);
    transform::ConcreteInstance i;
    i.fields["name"] = Scalar("HQ");
    auto r1 = room("a");
    r1.typeName = "Building.Room";
    auto r2 = room("b");
    r2.typeName = "Building.Room";
    i.nested["Room"] = {r1, r2};
    auto c = transform::to_generic(b, i, from_millis(1));
    const meta::Category* rooms = c.find_category("room");
    ASSERT_NE(rooms, nullptr);
    ASSERT_EQ(rooms->children.size(), 2u);
    EXPECT_EQ(rooms->children[0].name(), "0");
    EXPECT_EQ(rooms->children[1].name(), "1");
    EXPECT_EQ(rooms->children[1].category().sourceType, "Building.Room");
    EXPECT_EQ(rooms->children[1].category().find_entry("roomName")->values[0].value, Scalar("b"));
    EXPECT_EQ(transform::from_generic(b, c, from_millis(1)), transform::normalize(b, i));
}

TEST(ToGeneric, RejectsMismatchedInstance) {
    auto m = parse_ok(nimtest::kRoomNdf);
    transform::ConcreteInstance i;
    i.fields["roomName"] = Scalar(3.0);
    EXPECT_THROW(transform::to_generic(first_type(m), i, from_millis(0)), NimError);
    transform::ConcreteInstance j;
    j.fields["nope"] = Scalar("x");
    EXPECT_THROW(transform::to_generic(first_type(m), j, from_millis(0)), NimError);
}

TEST(FromGeneric, SourceTypeMismatchIsInvalid) {
    auto rm = parse_ok(nimtest::kRoomNdf);
    auto am = parse_ok(nimtest::kAnotherRoomNdf);
    transform::ConcreteInstance i;
    i.fields["roomID"] = Scalar("B7");
    auto c = transform::to_generic(first_type(am), i, from_millis(0));
    try {
        transform::from_generic(first_type(rm), c, from_millis(0));
        FAIL() << "expected NimError";
    } catch (const NimError& e) {
        EXPECT_EQ(e.code(), ErrorCode::Invalid);
    }
}

TEST(FromGeneric, ExpiredOnlyValueIsAbsent) {
    auto m = parse_ok(nimtest::kRoomNdf);
    auto c = transform::to_generic(first_type(m), room("R1"), from_millis(100));
    c.find_entry("roomName")->values[0].expiry = from_millis(150);
    EXPECT_EQ(transform::from_generic(first_type(m), c, from_millis(149)).fields.at("roomName"), Scalar("R1"));
    EXPECT_EQ(transform::from_generic(first_type(m), c, from_millis(150)).fields.at("roomName"), std::nullopt);
    EXPECT_EQ(transform::from_generic(first_type(m), c, from_millis(99)).fields.at("roomName"), std::nullopt);
}

TEST(FromGeneric, MissingEntryErrorsOrIsOmitted) {
    auto m = parse_ok(nimtest::kAnotherRoomNdf);
    transform::ConcreteInstance i;
    i.fields["roomID"] = Scalar("B7");
    auto c = transform::to_generic(first_type(m), i, from_millis(0));
    c.children.erase(c.children.begin()); // drop roomID
    EXPECT_THROW(transform::from_generic(first_type(m), c, from_millis(0)), NimError);
    auto partial = transform::from_generic(first_type(m), c, from_millis(0), transform::MissingEntry::Omit);
    EXPECT_EQ(partial.fields.count("roomID"), 0u);
    EXPECT_EQ(partial.fields.count("surface"), 1u);
}

TEST(TransformLaws, ShapeRoundTripAndInjectivity) {
    Rng rng(20240611);
    int checked = 0;
    for (int round = 0; round < 600; ++round) {
        const ndf::TypeDef type = nimtest::random_typedef(rng, round % 2 ? "p.q" : "", 3);
        int ids = 0;
        const auto inst = nimtest::random_instance(rng, type, ids);
        const Instant now = from_millis(1'700'000'000'000 + round);
        const meta::Category c = transform::to_generic(type, inst, now);

        // shape follows the type tree
        ASSERT_EQ(nimtest::oracle::actual_shape(c), nimtest::oracle::expected_shape(type, inst)) << "round " << round;
        // generic -> concrete recovers the instance, metadata and ids included
        ASSERT_EQ(transform::from_generic(type, c, now), inst) << "round " << round;

        // changing any one present field changes the generic form
        for (const auto& [name, value] : inst.fields) {
            auto other = inst;
            const ValueKind k = type.find_field(name)->fieldType;
            Scalar v = nimtest::random_scalar(rng, k);
            while (value && v == *value) v = nimtest::random_scalar(rng, k);
            other.fields[name] = v;
            if (other == inst) continue;
            ASSERT_NE(meta::category_to_json(transform::to_generic(type, other, now)), meta::category_to_json(c));
        }
        ++checked;
    }
    EXPECT_GE(checked, 500);
}

TEST(Plans, RoomExampleUsesBothSourcesInRegistrationOrder) {
    Harness h;
    h.must_register(nimtest::kRoomNdf);
    h.must_register(nimtest::kAnotherRoomNdf);
    h.must_register(nimtest::kStandardRoomNdf);
    const auto* plan = h.registry.snapshot()->plan("StandardRoom");
    ASSERT_NE(plan, nullptr);
    ASSERT_EQ(plan->perSource.size(), 2u);
    EXPECT_EQ(plan->perSource[0], (transform::SourceMapping{"Room", {{"identifier", "roomName"}}}));
    EXPECT_EQ(plan->perSource[1], (transform::SourceMapping{"AnotherRoom", {{"identifier", "roomID"}}}));
    EXPECT_TRUE(plan->diagnostics.empty());
}

TEST(Plans, PartialCoverageIsExcludedWithWarning) {
    Harness h;
    h.must_register("X { String a; Number b; }\nY { String a; }\n");
    auto r = h.registry.register_model("T { String a; Number b; }\nT.a := X.a | Y.a;\nT.b := X.b;\n");
    ASSERT_TRUE(r.accepted());
    const auto* plan = h.registry.snapshot()->plan("T");
    ASSERT_EQ(plan->perSource.size(), 1u);
    EXPECT_EQ(plan->perSource[0].sourceType, "X");
    ASSERT_EQ(plan->diagnostics.size(), 1u);
    EXPECT_EQ(plan->diagnostics[0].severity, ndf::Severity::Warning);
    EXPECT_EQ(plan->diagnostics[0].code, "PLAN");
    EXPECT_NE(plan->diagnostics[0].message.find("Y"), std::string::npos);
    // the warning is reported with the registration
    bool seen = false;
    for (const auto& d : r.diagnostics) seen |= d.code == "PLAN";
    EXPECT_TRUE(seen);
}

TEST(Plans, ChainResolvesToStoredFields) {
    Harness h;
    h.must_register("C { Number x; Number y; }");
    h.must_register("B { Number p; Number q; }\nB.p := C.x;\nB.q := C.y;\n");
    h.must_register("A { Number m; }\nA.m := B.q;\n");
    const auto* plan = h.registry.snapshot()->plan("A");
    ASSERT_EQ(plan->perSource.size(), 1u);
    EXPECT_EQ(plan->perSource[0], (transform::SourceMapping{"C", {{"m", "y"}}}));

    nimtest::oracle::RuleSet rules;
    rules["B"]["p"] = {{"C", "x"}};
    rules["B"]["q"] = {{"C", "y"}};
    rules["A"]["m"] = {{"B", "q"}};
    auto sub = nimtest::oracle::substitute(rules, "A");
    ASSERT_EQ(sub.at("m").size(), 1u);
    EXPECT_EQ(sub.at("m")[0], (std::pair<std::string, std::string>{"C", "y"}));
}

namespace {

using Alternatives = std::vector<std::pair<std::string, std::string>>;

// Plan predicted from substituted rules: stored types in registration order
// that appear for every target field, each field taking the first alternative.
std::vector<transform::SourceMapping> oracle_plan(const std::map<std::string, Alternatives>& substituted,
                                                  const std::vector<std::string>& fields,
                                                  const std::vector<std::string>& storedOrder) {
    std::vector<transform::SourceMapping> out;
    for (const auto& s : storedOrder) {
        transform::SourceMapping sm{s, {}};
        for (const auto& f : fields) {
            auto it = substituted.find(f);
            if (it == substituted.end()) continue;
            for (const auto& [t, sf] : it->second)
                if (t == s) {
                    sm.fieldMap.emplace(f, sf);
                    break;
                }
        }
        if (sm.fieldMap.size() == fields.size()) out.push_back(std::move(sm));
    }
    return out;
}

struct ChainWorld {
    Harness h;
    nimtest::oracle::RuleSet rules;
    std::vector<std::string> bases;
    std::vector<std::string> middles;
    std::string topText;
    std::vector<std::string> topRules;

    explicit ChainWorld(Rng& rng) {
        const int nb = nimtest::uniform(rng, 2, 6);
        std::string text;
        for (int i = 0; i < nb; ++i) {
            bases.push_back("B" + std::to_string(i));
            text += bases.back() + " { Number f0; Number f1; Number f2; }\n";
        }
        h.must_register(text);

        // each base feeds at most one consumer, so every stored type is
        // reached through a single path
        std::vector<std::string> pool = bases;
        std::shuffle(pool.begin(), pool.end(), rng);
        const int nm = nimtest::uniform(rng, 1, 3);
        for (int j = 0; j < nm && !pool.empty(); ++j) {
            const std::string v = "V" + std::to_string(j);
            std::vector<std::string> mine;
            for (int k = nimtest::uniform(rng, 1, 2); k > 0 && !pool.empty(); --k) {
                mine.push_back(pool.back());
                pool.pop_back();
            }
            std::string src = v + " { Number g0; Number g1; }\n";
            for (const std::string g : {"g0", "g1"}) {
                std::string line = v + "." + g + " := ";
                bool first = true;
                for (const auto& b : mine) {
                    if (!first && nimtest::chance(rng, 0.25)) continue; // leaves a partial source
                    const std::string f = "f" + std::to_string(nimtest::uniform(rng, 0, 2));
                    line += (first ? "" : " | ") + b + "." + f;
                    rules[v][g].emplace_back(b, f);
                    first = false;
                }
                src += line + ";\n";
            }
            h.must_register(src);
            middles.push_back(v);
        }

        std::vector<std::string> feeders = middles;
        for (const auto& b : pool) feeders.push_back(b);
        std::shuffle(feeders.begin(), feeders.end(), rng);
        topText = "W { Number h0; Number h1; }\n";
        for (const std::string hf : {"h0", "h1"}) {
            std::string line = "W." + hf + " := ";
            bool first = true;
            for (const auto& fd : feeders) {
                if (!first && nimtest::chance(rng, 0.3)) continue;
                const bool mid = fd[0] == 'V';
                const std::string f = mid ? "g" + std::to_string(nimtest::uniform(rng, 0, 1))
                                          : "f" + std::to_string(nimtest::uniform(rng, 0, 2));
                line += (first ? "" : " | ") + fd + "." + f;
                rules["W"][hf].emplace_back(fd, f);
                first = false;
            }
            topRules.push_back(line + ";\n");
        }
    }

    std::string top_model(Rng& rng, bool permute) const {
        auto rs = topRules;
        if (permute) {
            std::shuffle(rs.begin(), rs.end(), rng);
            for (auto& r : rs) {
                // shuffle the alternatives of each rule
                const auto eq = r.find(":= ");
                std::string rhs = r.substr(eq + 3, r.size() - eq - 3 - 2);
                std::vector<std::string> alts;
                for (std::size_t p = 0;;) {
                    auto bar = rhs.find(" | ", p);
                    alts.push_back(rhs.substr(p, bar == std::string::npos ? std::string::npos : bar - p));
                    if (bar == std::string::npos) break;
                    p = bar + 3;
                }
                std::shuffle(alts.begin(), alts.end(), rng);
                std::string joined;
                for (std::size_t i = 0; i < alts.size(); ++i) joined += (i ? " | " : "") + alts[i];
                r = r.substr(0, eq + 3) + joined + ";\n";
            }
        }
        std::string text = topText;
        for (const auto& r : rs) text += r;
        return text;
    }
};

std::vector<transform::MappingPlan> plans_for(const Harness& h, const std::string& text) {
    const auto snap = h.registry.snapshot();
    auto model = parse_ok(text);
    auto analysis = ndf::analyze(model, snap->symbols);
    EXPECT_FALSE(ndf::has_errors(analysis.diagnostics)) << text;
    return transform::build_plans(model, analysis, snap->symbols,
                                  [&](const std::string& q) { return snap->plan(q); });
}

} // namespace

TEST(Plans, ChainsMatchSubstitutionOracleAndIgnoreRuleOrder) {
    Rng rng(77);
    for (int round = 0; round < 300; ++round) {
        ChainWorld w(rng);
        const auto plans = plans_for(w.h, w.top_model(rng, false));
        ASSERT_EQ(plans.size(), 1u);
        const auto expected =
            oracle_plan(nimtest::oracle::substitute(w.rules, "W"), {"h0", "h1"}, w.bases);
        ASSERT_EQ(plans[0].perSource, expected) << w.top_model(rng, false);

        const auto again = plans_for(w.h, w.top_model(rng, true));
        ASSERT_EQ(again[0].perSource, plans[0].perSource);
    }
}

TEST(Plans, MiddleLayerMatchesOracleToo) {
    Rng rng(78);
    for (int round = 0; round < 100; ++round) {
        ChainWorld w(rng);
        const auto snap = w.h.registry.snapshot();
        for (const auto& v : w.middles) {
            const auto* plan = snap->plan(v);
            ASSERT_NE(plan, nullptr);
            EXPECT_EQ(plan->perSource, oracle_plan(nimtest::oracle::substitute(w.rules, v), {"g0", "g1"}, w.bases));
        }
    }
}

TEST(ResolveMapping, RoomExample) {
    Harness h;
    h.must_register(nimtest::kRoomNdf);
    h.must_register(nimtest::kAnotherRoomNdf);
    h.must_register(nimtest::kStandardRoomNdf);
    const auto snap = h.registry.snapshot();
    transform::ConcreteInstance r = room("A");
    h.store.create_instance(transform::to_generic(*snap->find("Room")->def, r, h.clock.now()));
    transform::ConcreteInstance a;
    a.fields["roomID"] = Scalar("B7");
    a.fields["surface"] = Scalar(20.0);
    h.store.create_instance(transform::to_generic(*snap->find("AnotherRoom")->def, a, h.clock.now()));

    auto out = transform::resolve_mapping(*snap->plan("StandardRoom"), h.store, std::vector<std::string>{});
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].fields.at("identifier"), Scalar("A"));
    EXPECT_EQ(out[1].fields.at("identifier"), Scalar("B7"));
    EXPECT_EQ(out[0].typeName, "StandardRoom");
    ASSERT_TRUE(out[0].instanceId && out[1].instanceId);
    EXPECT_NE(*out[0].instanceId, *out[1].instanceId);
}

TEST(ResolveMapping, WithheldSourceFieldIsLeftOut) {
    Harness h;
    h.must_register(nimtest::kRoomNdf);
    h.must_register("Tagged { String identifier; }\nTagged.identifier := Room.roomName;\n");
    const auto snap = h.registry.snapshot();
    auto r = room("secret");
    r.meta["roomName"].policy.agreedUsage = {"mgr"};
    h.store.create_instance(transform::to_generic(*snap->find("Room")->def, r, h.clock.now()));
    const auto* plan = snap->plan("Tagged");
    auto anon = transform::resolve_mapping(*plan, h.store, std::vector<std::string>{"tenant"});
    ASSERT_EQ(anon.size(), 1u);
    EXPECT_EQ(anon[0].fields.count("identifier"), 0u);
    auto mgr = transform::resolve_mapping(*plan, h.store, std::vector<std::string>{"mgr"});
    EXPECT_EQ(mgr[0].fields.at("identifier"), Scalar("secret"));
}

TEST(ResolveMapping, MatchesBruteForceOracle) {
    Rng rng(4242);
    const std::vector<std::vector<std::string>> principalSets = {{}, {"mgr"}, {"tenant"}, {"svc-1", "mgr"}};
    for (int round = 0; round < 150; ++round) {
        nimtest::MappingWorld w(rng, 200);
        const auto* plan = w.h.registry.snapshot()->plan(w.target);
        ASSERT_NE(plan, nullptr);
        for (int q = 0; q < 3; ++q) {
            const auto& principals = nimtest::pick(rng, principalSets);
            const Instant at = w.h.clock.now() + Duration{nimtest::uniform(rng, -80, 120)};
            const auto got = transform::resolve_mapping(*plan, w.h.store, principals, at);
            ASSERT_EQ(got, w.oracle(principals, at)) << w.ndf;
        }
    }
}

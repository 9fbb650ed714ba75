#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace protorel;
using nlohmann::json;

namespace {

Errc load_error(const json& doc) {
  try {
    load_taxonomy(doc);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error for " << doc.dump();
  return Errc::schema_error;
}

json act(const std::string& name, json parents = json::array()) {
  return {{"name", name}, {"kind", "act"}, {"parents", parents}};
}
json fluent(const std::string& name, json parents = json::array()) {
  return {{"name", name}, {"kind", "fluent"}, {"parents", parents}};
}

}  // namespace

TEST(Taxonomy, RequestChain) {
  const auto t = load_taxonomy(json{{"classes",
                                     {act("Directive"), act("Request", {"Directive"}),
                                      act("TimeRequest", {"Request"})}}});
  EXPECT_TRUE(t.subsumes(ClassId("Request"), ClassId("TimeRequest")));
  EXPECT_TRUE(t.subsumes(ClassId("Directive"), ClassId("TimeRequest")));
  EXPECT_TRUE(t.subsumes(ClassId("CommunicationAct"), ClassId("TimeRequest")));
  EXPECT_FALSE(t.subsumes(ClassId("TimeRequest"), ClassId("Request")));
}

TEST(Taxonomy, OnlyRoots) {
  const auto t = load_taxonomy(json{{"classes", json::array()}});
  EXPECT_EQ(t.size(), 2u);
  EXPECT_TRUE(t.subsumes(ClassId("Fluent"), ClassId("Fluent")));
  EXPECT_FALSE(t.subsumes(ClassId("Fluent"), ClassId("CommunicationAct")));
  EXPECT_EQ(parse_taxonomy("{}").size(), 2u);
}

TEST(Taxonomy, MutualParentsWithoutEquivalenceIsCycle) {
  EXPECT_EQ(load_error(json{{"classes", {fluent("A", {"B"}), fluent("B", {"A"})}}}), Errc::cycle_in_hierarchy);
  EXPECT_EQ(load_error(json{{"classes", {fluent("A", {"C"}), fluent("B", {"A"}), fluent("C", {"B"})}}}),
            Errc::cycle_in_hierarchy);
}

TEST(Taxonomy, MutualParentsWithEquivalenceIsFine) {
  auto a = fluent("A", {"B"});
  a["equivalentTo"] = {"B"};
  const auto t = load_taxonomy(json{{"classes", {a, fluent("B", {"A"})}}});
  EXPECT_TRUE(t.equivalent(ClassId("A"), ClassId("B")));
}

TEST(Taxonomy, LoadErrors) {
  EXPECT_EQ(load_error(json{{"classes", {fluent("A", {"Nope"})}}}), Errc::unknown_parent);
  EXPECT_EQ(load_error(json{{"classes", {fluent("A"), fluent("A")}}}), Errc::duplicate_class);
  EXPECT_EQ(load_error(json{{"classes", {fluent("Commitment")}}}), Errc::reserved_class_name);
  EXPECT_EQ(load_error(json{{"classes", {fluent("Fluent")}}}), Errc::duplicate_class);
  EXPECT_EQ(load_error(json{{"classes", {fluent("A", {"CommunicationAct"})}}}), Errc::kind_mismatch);
  EXPECT_EQ(load_error(json{{"classes", {{{"name", "A"}, {"kind", "fluent"}, {"colour", "red"}}}}}),
            Errc::schema_error);
  EXPECT_EQ(load_error(json{{"classes", 3}}), Errc::schema_error);
  auto bad_role = act("Shout");
  bad_role["effects"] = {{{"kind", "initiates"}, {"fluent", "volume"}}};
  EXPECT_EQ(load_error(json{{"classes", {bad_role}}}), Errc::unknown_role);
  auto bad_actor = act("Shout");
  bad_actor["effects"] = {{{"kind", "initiates"},
                           {"fluent",
                            {{"class", "Commitment"},
                             {"args", {{"debtor", "listener"}, {"creditor", "sender"}, {"condition", "content"}}}}}}};
  EXPECT_EQ(load_error(json{{"classes", {bad_actor}}}), Errc::unknown_role);
  auto missing_arg = act("Shout");
  missing_arg["effects"] = {
      {{"kind", "initiates"}, {"fluent", {{"class", "Commitment"}, {"args", {{"debtor", "sender"}}}}}}};
  EXPECT_EQ(load_error(json{{"classes", {missing_arg}}}), Errc::invalid_effect_pattern);
  EXPECT_THROW(parse_taxonomy("{not json"), Error);
}

TEST(Taxonomy, ReflexiveSubsumption) {
  const auto t = load_taxonomy_file(fixtures::data_path("hospital/taxonomy.json"));
  for (const auto& c : t.classes()) {
    EXPECT_TRUE(t.subsumes(c, c)) << c.name;
    EXPECT_TRUE(t.equivalent(c, c)) << c.name;
  }
}

TEST(Taxonomy, DeclaredEquivalence) {
  const auto t = load_taxonomy_file(fixtures::data_path("hospital/taxonomy.json"));
  EXPECT_TRUE(t.equivalent(ClassId("KQML-Ask-If"), ClassId("FIPA-Query-If")));
  EXPECT_TRUE(t.equivalent(ClassId("Assistance"), ClassId("MedicalAssistance")));
  EXPECT_TRUE(t.subsumes(ClassId("MedicalAssistance"), ClassId("Assistance")));
  EXPECT_EQ(t.layer(ClassId("KQML-Ask-If")), "standards");
  EXPECT_FALSE(t.layer(ClassId("Proposition")).has_value());
}

TEST(Taxonomy, ChainFluents) {
  const auto t = load_taxonomy_file(fixtures::data_path("pzchain/taxonomy.json"));
  EXPECT_TRUE(t.subsumes(ClassId("fb"), ClassId("fbb")));
  EXPECT_FALSE(t.subsumes(ClassId("fbb"), ClassId("fb")));
  EXPECT_FALSE(t.equivalent(ClassId("fb"), ClassId("fbb")));
}

TEST(Taxonomy, UnknownClassQueries) {
  const auto t = load_taxonomy(json{{"classes", {fluent("A")}}});
  try {
    t.subsumes(ClassId("A"), ClassId("Z"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_class);
  }
  EXPECT_THROW(t.equivalent(ClassId("Z"), ClassId("A")), Error);
}

TEST(Taxonomy, MostSpecificConcept) {
  const auto t = load_taxonomy(json{
      {"classes", {fluent("Proposition"), fluent("TimeInfo", {"Proposition"}), fluent("fa"), fluent("fb")}}});
  const std::vector<ClassId> single{ClassId("TimeInfo")};
  EXPECT_EQ(t.msc(single), ClassId("TimeInfo"));
  const std::vector<ClassId> chain{ClassId("Proposition"), ClassId("TimeInfo")};
  EXPECT_EQ(t.msc(chain), ClassId("TimeInfo"));
  const std::vector<ClassId> clash{ClassId("fa"), ClassId("fb")};
  try {
    t.msc(clash);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ambiguous_msc);
  }
  try {
    t.msc(std::vector<ClassId>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_asserted_class);
  }
}

TEST(Taxonomy, EffectsAreInherited) {
  const auto t = load_taxonomy_file(fixtures::data_path("asktime/taxonomy.json"));
  const auto& req = t.effective_effects(ClassId("Request"));
  const auto& treq = t.effective_effects(ClassId("TimeRequest"));
  ASSERT_EQ(req.size(), 1u);
  EXPECT_EQ(treq, req);
  EXPECT_TRUE(t.own_effects(ClassId("TimeRequest")).empty());
  EXPECT_TRUE(t.uses_role(ClassId("TimeInform"), Role::InReplyToContent));
  EXPECT_FALSE(t.uses_role(ClassId("TimeAccept"), Role::InReplyToContent));
}

TEST(Taxonomy, OwnEffectsComeFirst) {
  const auto t = load_taxonomy_file(fixtures::data_path("pairing/taxonomy.json"));
  const auto& effs = t.effective_effects(ClassId("TempAccept&Inform"));
  ASSERT_EQ(effs.size(), 4u);  // accept + content + two Responsive terminations
  const auto& own = t.own_effects(ClassId("Accept&Inform"));
  ASSERT_EQ(own.size(), 1u);
  EXPECT_EQ(t.effective_effects(ClassId("Accept&Inform")).front(), own.front());
  EXPECT_NE(std::find(effs.begin(), effs.end(), own.front()), effs.end());
}

// Closure laws over random taxonomies, checked by enumeration.
TEST(TaxonomyProperty, ClosureLaws) {
  std::mt19937 rng(7);
  for (int round = 0; round < 60; ++round) {
    const auto rt = fixtures::random_taxonomy(rng, 20);
    const auto& t = rt.tax;
    const auto cs = t.classes();
    ASSERT_LE(cs.size(), 20u);
    for (const auto& a : cs) {
      EXPECT_TRUE(t.subsumes(a, a));
      const ClassId root(std::string(t.kind(a) == ClassKind::Act ? Taxonomy::kActRoot : Taxonomy::kFluentRoot));
      EXPECT_TRUE(t.subsumes(root, a));
      for (const auto& b : cs) {
        EXPECT_EQ(t.equivalent(a, b), t.subsumes(a, b) && t.subsumes(b, a));
        EXPECT_EQ(t.equivalent(a, b), t.equivalent(b, a));
        if (!t.subsumes(a, b)) continue;
        for (const auto& c : cs)
          if (t.subsumes(b, c)) { EXPECT_TRUE(t.subsumes(a, c)); }
        // A subclass inherits every effective template of its superclass.
        if (t.kind(a) == ClassKind::Act) {
          for (const auto& e : t.effective_effects(a)) {
            const auto& sub = t.effective_effects(b);
            EXPECT_NE(std::find(sub.begin(), sub.end(), e), sub.end());
          }
        }
      }
    }
  }
}

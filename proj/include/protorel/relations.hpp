#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "protorel/assignment.hpp"
#include "protorel/branching.hpp"
#include "protorel/comparison.hpp"
#include "protorel/derivation.hpp"
#include "protorel/protocol.hpp"
#include "protorel/taxonomy.hpp"

namespace protorel {

enum class Flavor { Equivalence, Specialization };
enum class Structure { None, Prefix, Suffix, Infix, Complement };

inline constexpr std::array<Structure, 5> kStructures = {Structure::None, Structure::Prefix, Structure::Suffix,
                                                         Structure::Infix, Structure::Complement};

enum class RelationKind {
  Equivalent,
  Specialization,
  Prefix,
  SpecializedPrefix,
  Suffix,
  SpecializedSuffix,
  Infix,
  SpecializedInfix,
  ComplementToInfix,
  SpecializedComplementToInfix,
  None,
};

inline std::string_view to_string(RelationKind k) {
  switch (k) {
    case RelationKind::Equivalent: return "Equivalent";
    case RelationKind::Specialization: return "Specialization";
    case RelationKind::Prefix: return "Prefix";
    case RelationKind::SpecializedPrefix: return "SpecializedPrefix";
    case RelationKind::Suffix: return "Suffix";
    case RelationKind::SpecializedSuffix: return "SpecializedSuffix";
    case RelationKind::Infix: return "Infix";
    case RelationKind::SpecializedInfix: return "SpecializedInfix";
    case RelationKind::ComplementToInfix: return "ComplementToInfix";
    case RelationKind::SpecializedComplementToInfix: return "SpecializedComplementToInfix";
    case RelationKind::None: return "None";
  }
  return "";
}

inline RelationKind relation_kind(Flavor f, Structure s) {
  const int base = static_cast<int>(s) * 2 + (f == Flavor::Specialization ? 1 : 0);
  return static_cast<RelationKind>(base);
}

inline char structure_letter(Structure s) {
  switch (s) {
    case Structure::None: return '\0';
    case Structure::Prefix: return 'P';
    case Structure::Suffix: return 'S';
    case Structure::Infix: return 'I';
    case Structure::Complement: return 'C';
  }
  return '\0';
}

// State indices realizing a relation:
//   Prefix      {k}        A ~ Prune[B/s_k]
//   Suffix      {k}        A ~ ChangeInit[B/s_k]
//   Infix       {k, j}     A ~ Prune[ChangeInit[B/s_k]/s_j]
//   Complement  {m, k, l}  Prune[A/s_m] ~ Prune[B/s_k], ChangeInit[A/s_m] ~ ChangeInit[B/s_l]
struct BranchRelation {
  RelationKind kind = RelationKind::None;
  std::vector<std::size_t> witness;
};

// Whether a bijection between the traces exists whose pairs are eq (for
// Equivalence) or have msc(a) below msc(b) (for Specialization).
inline bool traces_related(const Taxonomy& tax, const FluentSet& a, const FluentSet& b, Flavor flavor) {
  if (a.size() != b.size()) return false;
  const std::vector<Fluent> va(a.begin(), a.end()), vb(b.begin(), b.end());
  return left_saturating_matching(va.size(), vb.size(), [&](std::size_t i, std::size_t j) {
           return flavor == Flavor::Equivalence ? compare_fluents(tax, va[i], vb[j]) == FluentCase::Eq
                                                : fluent_subsumes(tax, vb[j], va[i]);
         }).has_value();
}

inline bool branch_equivalent(const Taxonomy& tax, const DerivedBranch& a, const DerivedBranch& b) {
  return traces_related(tax, a.trace(), b.trace(), Flavor::Equivalence);
}

inline bool branch_specializes(const Taxonomy& tax, const DerivedBranch& a, const DerivedBranch& b) {
  return traces_related(tax, a.trace(), b.trace(), Flavor::Specialization);
}

// Traces of every suffix of a branch, each re-derived from the empty set.
// Element k is the derivation of ChangeInit[B/s_k].
inline std::vector<DerivedBranch> suffix_derivations(const Taxonomy& tax, const DerivedBranch& b) {
  std::vector<DerivedBranch> out;
  for (std::size_t k = 0; k <= b.size(); ++k) out.push_back(derive(tax, change_init(b.branch, k)));
  return out;
}

// Checks one (flavor, structure) combination and returns the witness.
// `b_suffixes` may be passed in to avoid re-deriving.
inline std::optional<std::vector<std::size_t>> relation_witness(const Taxonomy& tax, const DerivedBranch& a,
                                                                const DerivedBranch& b, Flavor flavor,
                                                                Structure structure,
                                                                const std::vector<DerivedBranch>* b_suffixes = nullptr) {
  std::vector<DerivedBranch> own;
  auto suffixes = [&]() -> const std::vector<DerivedBranch>& {
    if (b_suffixes) return *b_suffixes;
    if (own.empty()) own = suffix_derivations(tax, b);
    return own;
  };
  const std::size_t n = b.size();
  switch (structure) {
    case Structure::None:
      if (traces_related(tax, a.trace(), b.trace(), flavor)) return std::vector<std::size_t>{};
      return std::nullopt;
    case Structure::Prefix:
      for (std::size_t k = 0; k <= n; ++k)
        if (traces_related(tax, a.trace(), b.state_fluents[k], flavor)) return std::vector<std::size_t>{k};
      return std::nullopt;
    case Structure::Suffix:
      for (std::size_t k = 0; k <= n; ++k)
        if (traces_related(tax, a.trace(), suffixes()[k].trace(), flavor)) return std::vector<std::size_t>{k};
      return std::nullopt;
    case Structure::Infix:
      for (std::size_t k = 0; k <= n; ++k) {
        const auto& s = suffixes()[k];
        for (std::size_t j = 0; j <= s.size(); ++j)
          if (traces_related(tax, a.trace(), s.state_fluents[j], flavor)) return std::vector<std::size_t>{k, j};
      }
      return std::nullopt;
    case Structure::Complement:
      for (std::size_t m = 0; m <= a.size(); ++m) {
        std::optional<std::size_t> pre;
        for (std::size_t k = 0; k <= n && !pre; ++k)
          if (traces_related(tax, a.state_fluents[m], b.state_fluents[k], flavor)) pre = k;
        if (!pre) continue;
        const FluentSet tail = derive(tax, change_init(a.branch, m)).trace();
        for (std::size_t l = 0; l <= n; ++l)
          if (traces_related(tax, tail, suffixes()[l].trace(), flavor))
            return std::vector<std::size_t>{m, *pre, l};
      }
      return std::nullopt;
  }
  return std::nullopt;
}

inline bool relation_holds(const Taxonomy& tax, const DerivedBranch& a, const DerivedBranch& b, Flavor flavor,
                           Structure structure) {
  return relation_witness(tax, a, b, flavor, structure).has_value();
}

// Re-checks a reported witness without searching.
inline bool check_witness(const Taxonomy& tax, const DerivedBranch& a, const DerivedBranch& b,
                          const BranchRelation& r) {
  if (r.kind == RelationKind::None) return true;
  const auto idx = static_cast<int>(r.kind);
  const Flavor flavor = idx % 2 ? Flavor::Specialization : Flavor::Equivalence;
  const Structure s = kStructures[static_cast<std::size_t>(idx / 2)];
  const auto& w = r.witness;
  auto in_range = [](std::size_t k, std::size_t n) { return k <= n; };
  switch (s) {
    case Structure::None: return w.empty() && traces_related(tax, a.trace(), b.trace(), flavor);
    case Structure::Prefix:
      return w.size() == 1 && in_range(w[0], b.size()) &&
             traces_related(tax, a.trace(), derive(tax, prune(b.branch, w[0])).trace(), flavor);
    case Structure::Suffix:
      return w.size() == 1 && in_range(w[0], b.size()) &&
             traces_related(tax, a.trace(), derive(tax, change_init(b.branch, w[0])).trace(), flavor);
    case Structure::Infix:
      return w.size() == 2 && in_range(w[0], b.size()) && in_range(w[1], b.size() - w[0]) &&
             traces_related(tax, a.trace(), derive(tax, prune(change_init(b.branch, w[0]), w[1])).trace(), flavor);
    case Structure::Complement:
      return w.size() == 3 && in_range(w[0], a.size()) && in_range(w[1], b.size()) && in_range(w[2], b.size()) &&
             traces_related(tax, derive(tax, prune(a.branch, w[0])).trace(),
                            derive(tax, prune(b.branch, w[1])).trace(), flavor) &&
             traces_related(tax, derive(tax, change_init(a.branch, w[0])).trace(),
                            derive(tax, change_init(b.branch, w[2])).trace(), flavor);
  }
  return false;
}

// Most specific relation from A to B. Structures are tried from least to most
// general, equivalence before specialization within each.
inline BranchRelation branch_relation(const Taxonomy& tax, const DerivedBranch& a, const DerivedBranch& b) {
  const auto suffixes = suffix_derivations(tax, b);
  for (Structure s : kStructures) {
    for (Flavor f : {Flavor::Equivalence, Flavor::Specialization}) {
      if (auto w = relation_witness(tax, a, b, f, s, &suffixes)) return {relation_kind(f, s), std::move(*w)};
    }
  }
  return {};
}

struct RelationLabel {
  Flavor flavor = Flavor::Equivalence;
  Structure structure = Structure::None;
  bool restricted = false;

  friend bool operator==(const RelationLabel&, const RelationLabel&) = default;

  std::string to_string() const {
    std::string s(1, flavor == Flavor::Equivalence ? 'E' : 'Z');
    if (char c = structure_letter(structure)) s += c;
    if (restricted) s += 'R';
    return s;
  }
};

// For each branch of the left protocol, a distinct right branch such that
// every pair satisfies (flavor, structure). Exact: bipartite matching over
// the pairwise relation graph.
inline std::optional<std::vector<std::size_t>> find_bijection(const Taxonomy& tax,
                                                              const std::vector<DerivedBranch>& d1,
                                                              const std::vector<DerivedBranch>& d2, Flavor flavor,
                                                              Structure structure) {
  std::vector<std::vector<DerivedBranch>> sufs;
  for (const auto& b : d2) sufs.push_back(suffix_derivations(tax, b));
  return left_saturating_matching(d1.size(), d2.size(), [&](std::size_t i, std::size_t j) {
    return relation_witness(tax, d1[i], d2[j], flavor, structure, &sufs[j]).has_value();
  });
}

struct PairReport {
  std::size_t left = 0, right = 0;  // indices in Omega(P1), Omega(P2)
  BranchRelation relation;
  std::optional<Valuation> valuation;
  Rational f{0};
};

struct ClassificationReport {
  std::vector<DerivedBranch> left, right;
  ComparisonTable table;
  std::optional<Matching> matching;
  std::vector<PairReport> per_pair;                              // along the matching
  std::optional<RelationLabel> label;
  std::string path;                                              // "matching", "bijection-search" or ""
  std::vector<std::pair<std::size_t, std::size_t>> label_pairs;  // pairs witnessing the label
};

// Label of P1 relative to P2. The left operand must not have more branches
// than the right. Each (flavor, structure) is tried in order of generality;
// the optimal matching is tried first, then an exact search over all
// injective branch maps.
inline ClassificationReport classify_report(const Taxonomy& tax, const Protocol& p1, const Protocol& p2) {
  ClassificationReport r;
  r.left = derive_all(tax, p1);
  r.right = derive_all(tax, p2);
  r.table = comparison_table(tax, r.left, r.right);
  r.matching = best_matching(r.table);

  std::vector<std::vector<DerivedBranch>> sufs;
  for (const auto& b : r.right) sufs.push_back(suffix_derivations(tax, b));

  if (r.matching) {
    for (const auto& [i, j] : r.matching->pairs) {
      PairReport pr{i, j, {}, r.table.at(i, j).valuation, r.table.at(i, j).f};
      for (Structure s : kStructures) {
        bool found = false;
        for (Flavor f : {Flavor::Equivalence, Flavor::Specialization}) {
          if (auto w = relation_witness(tax, r.left[i], r.right[j], f, s, &sufs[j])) {
            pr.relation = {relation_kind(f, s), std::move(*w)};
            found = true;
            break;
          }
        }
        if (found) break;
      }
      r.per_pair.push_back(std::move(pr));
    }
  }

  if (r.left.size() > r.right.size()) return r;
  const bool restricted = r.left.size() < r.right.size();
  for (Flavor f : {Flavor::Equivalence, Flavor::Specialization}) {
    for (Structure s : kStructures) {
      if (r.matching && r.matching->pairs.size() == r.left.size()) {
        const bool all = std::all_of(r.matching->pairs.begin(), r.matching->pairs.end(), [&](const auto& pr) {
          return relation_witness(tax, r.left[pr.first], r.right[pr.second], f, s, &sufs[pr.second]).has_value();
        });
        if (all) {
          r.label = RelationLabel{f, s, restricted};
          r.path = "matching";
          r.label_pairs = r.matching->pairs;
          return r;
        }
      }
      auto bij = left_saturating_matching(r.left.size(), r.right.size(), [&](std::size_t i, std::size_t j) {
        return relation_witness(tax, r.left[i], r.right[j], f, s, &sufs[j]).has_value();
      });
      if (bij) {
        r.label = RelationLabel{f, s, restricted};
        r.path = "bijection-search";
        for (std::size_t i = 0; i < bij->size(); ++i) r.label_pairs.emplace_back(i, (*bij)[i]);
        return r;
      }
    }
  }
  return r;
}

inline std::optional<RelationLabel> classify(const Taxonomy& tax, const Protocol& p1, const Protocol& p2) {
  return classify_report(tax, p1, p2).label;
}

}  // namespace protorel

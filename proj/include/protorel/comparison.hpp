#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "protorel/assignment.hpp"
#include "protorel/derivation.hpp"
#include "protorel/error.hpp"
#include "protorel/fluent.hpp"
#include "protorel/taxonomy.hpp"

namespace protorel {

using Rational = boost::rational<std::int64_t>;

enum class FluentCase { Eq, G1, G2, In };

inline std::string_view to_string(FluentCase c) {
  switch (c) {
    case FluentCase::Eq: return "eq";
    case FluentCase::G1: return "g1";
    case FluentCase::G2: return "g2";
    case FluentCase::In: return "in";
  }
  return "";
}

// Concept-level subsumption between fluents: `general` describes a class of
// fluents containing `specific`. Both must share a variant and the same actors
// in the same roles; class-valued slots compare through the taxonomy, nested
// propositions recursively.
inline bool fluent_subsumes(const Taxonomy& tax, const Fluent& general, const Fluent& specific) {
  if (general.kind() != specific.kind()) return false;
  switch (general.kind()) {
    case Fluent::Kind::Domain: return tax.subsumes(general.cls(), specific.cls());
    case Fluent::Kind::Acceptance:
    case Fluent::Kind::Rejection:
      return general.party() == specific.party() && general.counterparty() == specific.counterparty() &&
             tax.subsumes(general.cls(), specific.cls());
    case Fluent::Kind::Commitment:
      return general.party() == specific.party() && general.counterparty() == specific.counterparty() &&
             fluent_subsumes(tax, general.committed(), specific.committed());
    case Fluent::Kind::ConditionalCommitment:
      return general.party() == specific.party() && general.counterparty() == specific.counterparty() &&
             fluent_subsumes(tax, general.committed(), specific.committed()) &&
             fluent_subsumes(tax, general.trigger(), specific.trigger());
  }
  return false;
}

// eq: mutually subsuming. g1: f1 is the more general. g2: f2 is the more
// general. in: neither.
inline FluentCase compare_fluents(const Taxonomy& tax, const Fluent& f1, const Fluent& f2) {
  const bool down = fluent_subsumes(tax, f1, f2);
  const bool up = fluent_subsumes(tax, f2, f1);
  if (down && up) return FluentCase::Eq;
  if (down) return FluentCase::G1;
  if (up) return FluentCase::G2;
  return FluentCase::In;
}

inline bool fluents_related(const Taxonomy& tax, const Fluent& a, const Fluent& b) {
  return compare_fluents(tax, a, b) != FluentCase::In;
}

inline bool is_feasible(const Taxonomy& tax, const FluentSet& t1, const FluentSet& t2) {
  auto covered = [&tax](const FluentSet& from, const FluentSet& to) {
    return std::all_of(from.begin(), from.end(), [&](const Fluent& a) {
      return std::any_of(to.begin(), to.end(), [&](const Fluent& b) { return fluents_related(tax, a, b); });
    });
  };
  return covered(t1, t2) || covered(t2, t1);
}

struct Valuation {
  std::int64_t x0 = 0, x1 = 0, x2 = 0, x3 = 0;

  std::int64_t sum() const { return x0 + x1 + x2 + x3; }
  friend bool operator==(const Valuation&, const Valuation&) = default;

  std::string to_string() const {
    return "(" + std::to_string(x0) + "," + std::to_string(x1) + "," + std::to_string(x2) + "," +
           std::to_string(x3) + ")";
  }
};

// f = (x0 + max(x1, x2)) / sum, with f(0,0,0,0) = 1.
inline Rational similarity(const Valuation& v) {
  if (v.sum() == 0) return Rational(1);
  return Rational(v.x0 + std::max(v.x1, v.x2), v.sum());
}

// g = x0 / sum, with g(0,0,0,0) = 1.
inline Rational tie_break(const Valuation& v) {
  if (v.sum() == 0) return Rational(1);
  return Rational(v.x0, v.sum());
}

namespace detail {

// Maximum pairing, then most eq pairs, then most pairs of the favoured case.
inline Valuation count_pairing(const Taxonomy& tax, const std::vector<Fluent>& a, const std::vector<Fluent>& b,
                               FluentCase favoured) {
  constexpr std::int64_t kPair = 1'000'000, kEq = 1'000, kFav = 1;
  std::vector<std::vector<std::int64_t>> w(a.size(), std::vector<std::int64_t>(b.size(), 0));
  std::vector<std::vector<FluentCase>> cases(a.size(), std::vector<FluentCase>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto c = compare_fluents(tax, a[i], b[j]);
      cases[i][j] = c;
      if (c == FluentCase::In) continue;
      w[i][j] = kPair + (c == FluentCase::Eq ? kEq : 0) + (c == favoured ? kFav : 0);
    }
  }
  Valuation v;
  const auto assign = max_weight_assignment(w);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (assign[i] < 0) continue;
    switch (cases[i][static_cast<std::size_t>(assign[i])]) {
      case FluentCase::Eq: ++v.x0; break;
      case FluentCase::G1: ++v.x1; break;
      case FluentCase::G2: ++v.x2; break;
      case FluentCase::In: break;
    }
  }
  return v;
}

}  // namespace detail

inline Valuation valuate(const Taxonomy& tax, const FluentSet& t1, const FluentSet& t2) {
  if (!is_feasible(tax, t1, t2))
    throw Error(Errc::infeasible_pair, "traces " + to_string(t1) + " and " + to_string(t2) + " are not feasible");
  const std::vector<Fluent> a(t1.begin(), t1.end()), b(t2.begin(), t2.end());
  Valuation best = detail::count_pairing(tax, a, b, FluentCase::G1);
  const Valuation other = detail::count_pairing(tax, a, b, FluentCase::G2);
  if (std::max(other.x1, other.x2) > std::max(best.x1, best.x2)) best = other;
  const auto n1 = static_cast<std::int64_t>(t1.size()), n2 = static_cast<std::int64_t>(t2.size());
  best.x3 = n1 > n2 ? n1 - n2 : n2 - n1;
  return best;
}

struct PairCell {
  bool feasible = false;
  std::optional<Valuation> valuation;  // set iff feasible
  Rational f{0}, g{0};
};

// Feasibility and valuation of every branch pair.
struct ComparisonTable {
  std::size_t rows = 0, cols = 0;
  std::vector<std::vector<PairCell>> cells;  // [i in P1][j in P2]

  const PairCell& at(std::size_t i, std::size_t j) const { return cells.at(i).at(j); }

  std::vector<std::pair<std::size_t, std::size_t>> infeasible() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (!cells[i][j].feasible) out.emplace_back(i, j);
    return out;
  }
};

inline ComparisonTable comparison_table(const Taxonomy& tax, const std::vector<DerivedBranch>& p1,
                                        const std::vector<DerivedBranch>& p2) {
  ComparisonTable t{p1.size(), p2.size(), {}};
  t.cells.assign(p1.size(), std::vector<PairCell>(p2.size()));
  for (std::size_t i = 0; i < p1.size(); ++i) {
    for (std::size_t j = 0; j < p2.size(); ++j) {
      auto& c = t.cells[i][j];
      c.feasible = is_feasible(tax, p1[i].trace(), p2[j].trace());
      if (!c.feasible) continue;
      c.valuation = valuate(tax, p1[i].trace(), p2[j].trace());
      c.f = similarity(*c.valuation);
      c.g = tie_break(*c.valuation);
    }
  }
  return t;
}

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (index in P1, index in P2), sorted
  std::vector<Rational> scores;                            // f per pair
  Rational total{0};                                       // sum of f
  Rational total_g{0};                                     // sum of g
};

// Exact search over injective maps covering the smaller side using feasible
// pairs only. Maximizes the sum of f, then the sum of g, then takes the
// lexicographically least sorted pair list.
inline std::optional<Matching> best_matching(const ComparisonTable& t) {
  const bool rows_are_p1 = t.rows <= t.cols;
  const std::size_t n = rows_are_p1 ? t.rows : t.cols;
  const std::size_t m = rows_are_p1 ? t.cols : t.rows;
  auto cell = [&](std::size_t r, std::size_t c) -> const PairCell& {
    return rows_are_p1 ? t.at(r, c) : t.at(c, r);
  };

  // Optimistic bound: best f achievable by each remaining row on its own.
  std::vector<Rational> row_best(n, Rational(0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c)
      if (cell(r, c).feasible) row_best[r] = std::max(row_best[r], cell(r, c).f);
  std::vector<Rational> suffix_bound(n + 1, Rational(0));
  for (std::size_t r = n; r-- > 0;) suffix_bound[r] = suffix_bound[r + 1] + row_best[r];

  std::optional<Matching> best;
  std::vector<std::size_t> chosen;
  std::vector<bool> used(m, false);
  Rational f_sum(0), g_sum(0);

  auto as_pairs = [&](const std::vector<std::size_t>& cols) {
    std::vector<std::pair<std::size_t, std::size_t>> ps;
    for (std::size_t r = 0; r < cols.size(); ++r)
      ps.emplace_back(rows_are_p1 ? r : cols[r], rows_are_p1 ? cols[r] : r);
    std::sort(ps.begin(), ps.end());
    return ps;
  };

  auto search = [&](auto&& self, std::size_t r) -> void {
    if (best && f_sum + suffix_bound[r] < best->total) return;
    if (r == n) {
      auto ps = as_pairs(chosen);
      const bool better = !best || f_sum > best->total ||
                          (f_sum == best->total &&
                           (g_sum > best->total_g || (g_sum == best->total_g && ps < best->pairs)));
      if (!better) return;
      Matching mt;
      mt.pairs = std::move(ps);
      for (const auto& [i, j] : mt.pairs) mt.scores.push_back(t.at(i, j).f);
      mt.total = f_sum;
      mt.total_g = g_sum;
      best = std::move(mt);
      return;
    }
    for (std::size_t c = 0; c < m; ++c) {
      if (used[c] || !cell(r, c).feasible) continue;
      used[c] = true;
      chosen.push_back(c);
      f_sum += cell(r, c).f;
      g_sum += cell(r, c).g;
      self(self, r + 1);
      f_sum -= cell(r, c).f;
      g_sum -= cell(r, c).g;
      chosen.pop_back();
      used[c] = false;
    }
  };
  search(search, 0);
  return best;
}

inline std::optional<Matching> best_matching(const Taxonomy& tax, const std::vector<DerivedBranch>& p1,
                                             const std::vector<DerivedBranch>& p2) {
  return best_matching(comparison_table(tax, p1, p2));
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

}  // namespace protorel

#pragma once
// Shared fixtures, random generators and brute-force oracles for the unit
// tests and the acceptance binary.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "protorel/protorel.hpp"

namespace protorel::fixtures {

inline std::string data_path(const std::string& rel) { return std::string(PROTOREL_DATA_DIR) + "/" + rel; }

struct Scenario {
  Taxonomy tax;
  Protocol p1, p2;
};

inline Scenario load_scenario(const std::string& dir, const std::string& a = "p1.json",
                              const std::string& b = "p2.json") {
  Taxonomy tax = load_taxonomy_file(data_path(dir + "/taxonomy.json"));
  Protocol p1 = load_protocol_file(data_path(dir + "/" + a), &tax);
  Protocol p2 = load_protocol_file(data_path(dir + "/" + b), &tax);
  return {std::move(tax), std::move(p1), std::move(p2)};
}

// ---------------------------------------------------------------------------
// Random taxonomies

using nlohmann::json;

inline json init(json f) { return {{"kind", "initiates"}, {"fluent", std::move(f)}}; }
inline json term(json f) { return {{"kind", "terminates"}, {"fluent", std::move(f)}}; }
inline json acceptance(json sig, json addr, json obj) {
  return {{"class", "Acceptance"}, {"args", {{"signatory", sig}, {"addressee", addr}, {"object", obj}}}};
}
inline json commitment(json debtor, json creditor, json cond) {
  return {{"class", "Commitment"}, {"args", {{"debtor", debtor}, {"creditor", creditor}, {"condition", cond}}}};
}
inline json conditional(json debtor, json creditor, json trigger, json cond) {
  return {{"class", "ConditionalCommitment"},
          {"args", {{"debtor", debtor}, {"creditor", creditor}, {"trigger", trigger}, {"condition", cond}}}};
}

// Eight act classes with the standard effect templates plus one that
// initiates a base commitment directly and one that both accepts and
// responds. Together with the two roots they use ten classes.
inline json upper_acts() {
  json acts = json::array();
  acts.push_back({{"name", "Request"},
                  {"kind", "act"},
                  {"effects", {init(conditional("receiver", "sender", acceptance("receiver", "sender", "content"),
                                                "content"))}}});
  acts.push_back({{"name", "Accept"}, {"kind", "act"}, {"effects", {init(acceptance("sender", "receiver", "content"))}}});
  acts.push_back({{"name", "Reject"},
                  {"kind", "act"},
                  {"effects", {init({{"class", "Rejection"},
                                     {"args", {{"signatory", "sender"}, {"addressee", "receiver"}, {"object", "content"}}}})}}});
  acts.push_back({{"name", "Inform"}, {"kind", "act"}, {"effects", {init("content")}}});
  acts.push_back({{"name", "Responsive"},
                  {"kind", "act"},
                  {"parents", {"Inform"}},
                  {"effects",
                   {term(commitment("sender", "receiver", "inReplyToContent")),
                    term(conditional("sender", "receiver", acceptance("sender", "receiver", "inReplyToContent"),
                                     "inReplyToContent"))}}});
  acts.push_back({{"name", "Promise"}, {"kind", "act"}, {"effects", {init(commitment("sender", "receiver", "content"))}}});
  acts.push_back({{"name", "AcceptInform"},
                  {"kind", "act"},
                  {"parents", {"Responsive"}},
                  {"effects", {init(acceptance("sender", "receiver", "inReplyToContent"))}}});
  acts.push_back({{"name", "Offer"},
                  {"kind", "act"},
                  {"effects", {init(conditional("sender", "receiver", "inReplyToContent", "content"))}}});
  return acts;
}

inline const std::vector<std::string>& upper_act_names() {
  static const std::vector<std::string> names{"Request", "Accept",   "Reject",       "Inform",
                                              "Responsive", "Promise", "AcceptInform", "Offer"};
  return names;
}

struct RandomTaxonomy {
  Taxonomy tax;
  json doc;
  std::vector<ClassId> fluents;  // user fluent classes
  std::vector<ClassId> acts;     // every act class except the root
};

// At most `max_classes` classes in total, roots included. Fluent classes form
// a random DAG with occasional equivalences; a few extra act subclasses may
// add their own templates.
inline RandomTaxonomy random_taxonomy(std::mt19937& rng, std::size_t max_classes = 20) {
  json classes = upper_acts();
  std::vector<std::string> act_names = upper_act_names();
  const std::size_t budget = max_classes - 2 - act_names.size();
  std::uniform_int_distribution<std::size_t> nf(2, std::max<std::size_t>(2, budget - 1));
  const std::size_t n_fluents = std::min(nf(rng), budget);
  const std::size_t n_extra_acts = std::min<std::size_t>(budget - n_fluents, 2);

  std::vector<std::string> fl;
  for (std::size_t i = 0; i < n_fluents; ++i) {
    const std::string name = "F" + std::to_string(i);
    json c = {{"name", name}, {"kind", "fluent"}};
    json parents = json::array();
    for (std::size_t j = 0; j < i; ++j)
      if (std::uniform_int_distribution<int>(0, 3)(rng) == 0 && parents.size() < 2) parents.push_back(fl[j]);
    if (!parents.empty()) c["parents"] = parents;
    if (i > 0 && parents.empty() && std::uniform_int_distribution<int>(0, 5)(rng) == 0)
      c["equivalentTo"] = {fl[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]};
    classes.push_back(c);
    fl.push_back(name);
  }
  for (std::size_t i = 0; i < n_extra_acts; ++i) {
    const std::string name = "X" + std::to_string(i);
    const std::string parent = act_names[std::uniform_int_distribution<std::size_t>(0, 4)(rng)];
    json c = {{"name", name}, {"kind", "act"}, {"parents", {parent}}};
    if (std::uniform_int_distribution<int>(0, 1)(rng))
      c["effects"] = {init(json{{"class", fl[std::uniform_int_distribution<std::size_t>(0, fl.size() - 1)(rng)]}})};
    classes.push_back(c);
    act_names.push_back(name);
  }
  json doc = {{"classes", classes}};
  RandomTaxonomy out{load_taxonomy(doc), doc, {}, {}};
  for (const auto& f : fl) out.fluents.emplace_back(f);
  for (const auto& a : act_names) out.acts.emplace_back(a);
  return out;
}

inline const std::vector<std::string>& actors() {
  static const std::vector<std::string> a{"A", "B"};
  return a;
}

inline ActInstance random_act(std::mt19937& rng, const RandomTaxonomy& rt) {
  auto pick = [&rng](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  ActInstance a;
  a.act_class = pick(rt.acts);
  a.sender = pick(actors());
  do a.receiver = pick(actors());
  while (a.receiver == a.sender);
  a.content = pick(rt.fluents);
  if (rt.tax.uses_role(a.act_class, Role::InReplyToContent)) a.in_reply_to = pick(rt.fluents);
  return a;
}

inline std::vector<ActInstance> random_sequence(std::mt19937& rng, const RandomTaxonomy& rt, std::size_t len) {
  std::vector<ActInstance> seq;
  for (std::size_t i = 0; i < len; ++i) seq.push_back(random_act(rng, rt));
  return seq;
}

// Tree protocol from up to `max_branches` random sequences of length 1..max_len.
// Sequences that would make the protocol nondeterministic are redrawn.
inline Protocol random_trie_protocol(std::mt19937& rng, const RandomTaxonomy& rt, const std::string& id,
                                     std::size_t max_branches = 6, std::size_t max_len = 5) {
  const std::size_t nb = std::uniform_int_distribution<std::size_t>(1, max_branches)(rng);
  std::vector<std::vector<ActInstance>> seqs;
  for (int attempts = 0; seqs.size() < nb && attempts < 200; ++attempts) {
    auto seq = random_sequence(rng, rt, std::uniform_int_distribution<std::size_t>(1, max_len)(rng));
    auto candidate = seqs;
    candidate.push_back(seq);
    try {
      auto p = protocol_from_sequences(id, candidate, &rt.tax);
      if (enumerate_branches(p).size() == candidate.size()) seqs = std::move(candidate);
    } catch (const Error&) {
    }
  }
  return protocol_from_sequences(id, seqs, &rt.tax);
}

// A protocol whose branches mostly come from `p`: branches are shuffled,
// some dropped, some contents swapped for another random class and a few
// fresh branches added. Gives comparison tables with many feasible cells.
inline Protocol perturbed_protocol(std::mt19937& rng, const RandomTaxonomy& rt, const Protocol& p,
                                   const std::string& id, std::size_t max_branches = 6) {
  std::vector<std::vector<ActInstance>> seqs;
  for (const auto& b : enumerate_branches(p)) seqs.push_back(acts_of(b));
  std::shuffle(seqs.begin(), seqs.end(), rng);
  std::bernoulli_distribution drop(0.25), swap(0.15), add(0.4);
  std::vector<std::vector<ActInstance>> out;
  auto try_add = [&](std::vector<ActInstance> seq) {
    auto candidate = out;
    candidate.push_back(std::move(seq));
    try {
      if (enumerate_branches(protocol_from_sequences(id, candidate, &rt.tax)).size() == candidate.size())
        out = std::move(candidate);
    } catch (const Error&) {
    }
  };
  for (auto seq : seqs) {
    if (out.size() >= max_branches) break;
    if (!out.empty() && drop(rng)) continue;
    for (auto& a : seq)
      if (swap(rng)) a.content = rt.fluents[std::uniform_int_distribution<std::size_t>(0, rt.fluents.size() - 1)(rng)];
    try_add(seq);
  }
  while (out.size() < max_branches && add(rng))
    try_add(random_sequence(rng, rt, std::uniform_int_distribution<std::size_t>(1, 5)(rng)));
  if (out.empty()) return random_trie_protocol(rng, rt, id, max_branches);
  return protocol_from_sequences(id, out, &rt.tax);
}

// Random DAG over at most `max_states` states: edges only go from lower to
// higher index, states that cannot reach the last state are patched with an
// edge to it, and unreachable states are dropped.
inline Protocol random_dag_protocol(std::mt19937& rng, const RandomTaxonomy& rt, std::size_t max_states = 12) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_states)(rng);
  std::vector<std::vector<std::pair<std::size_t, ActInstance>>> out(n);
  auto edge_ok = [&](std::size_t from, const ActInstance& a) {
    return std::none_of(out[from].begin(), out[from].end(),
                        [&](const auto& e) { return e.second.act_class == a.act_class; });
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::uniform_int_distribution<int>(0, 2)(rng) != 0) continue;
      auto a = random_act(rng, rt);
      if (edge_ok(i, a)) out[i].emplace_back(j, a);
    }
  }
  std::set<std::size_t> finals{n - 1};
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) finals.insert(i);
  // Liveness: every state must reach a final state.
  std::vector<bool> live(n, false);
  for (std::size_t i = n; i-- > 0;) {
    live[i] = finals.count(i) != 0;
    for (const auto& [j, _] : out[i]) live[i] = live[i] || live[j];
    while (!live[i]) {
      auto a = random_act(rng, rt);
      if (edge_ok(i, a)) {
        out[i].emplace_back(n - 1, a);
        live[i] = true;
      }
    }
  }
  std::vector<bool> reach(n, false);
  reach[0] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i])
      for (const auto& [j, _] : out[i]) reach[j] = true;
  std::vector<std::string> states, fin;
  std::vector<Transition> ts;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reach[i]) continue;
    states.push_back("q" + std::to_string(i));
    if (finals.count(i)) fin.push_back(states.back());
    for (const auto& [j, a] : out[i]) ts.push_back({"q" + std::to_string(i), a, "q" + std::to_string(j)});
  }
  return make_protocol("D", states, "q0", fin, ts, &rt.tax);
}

inline FluentSet random_fluent_set(std::mt19937& rng, const RandomTaxonomy& rt, std::size_t max_size = 4) {
  auto pick = [&rng](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  auto prop = [&]() -> Fluent {
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: return Fluent::acceptance("B", "A", pick(rt.fluents));
      case 1: return Fluent::acceptance("A", "B", pick(rt.fluents));
      default: return Fluent::domain(pick(rt.fluents));
    }
  };
  FluentSet g;
  const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_size)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string x = pick(actors()), y = x == "A" ? "B" : "A";
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0: g.insert(prop()); break;
      case 1: g.insert(Fluent::commitment(x, y, Fluent::domain(pick(rt.fluents)))); break;
      case 2: g.insert(Fluent::conditional(x, y, prop(), Fluent::domain(pick(rt.fluents)))); break;
      default:
        g.insert(Fluent::conditional(x, y, Fluent::commitment(y, x, Fluent::domain(pick(rt.fluents))),
                                     Fluent::domain(pick(rt.fluents))));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Oracles

// Every root-to-final path as a list of transition indices, found without
// looking at the protocol's successor ordering.
inline std::set<std::vector<std::size_t>> brute_force_paths(const Protocol& p) {
  std::set<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  const auto& ts = p.transitions();
  std::function<void(const std::string&)> go = [&](const std::string& s) {
    if (p.is_final(s)) out.insert(cur);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i].from != s) continue;
      cur.push_back(i);
      go(ts[i].to);
      cur.pop_back();
    }
  };
  go(p.initial());
  return out;
}

inline std::vector<std::size_t> transition_indices(const Protocol& p, const Branch& b) {
  std::vector<std::size_t> out;
  for (const auto& step : b.steps) {
    auto it = std::find(p.transitions().begin(), p.transitions().end(), step);
    out.push_back(static_cast<std::size_t>(it - p.transitions().begin()));
  }
  return out;
}

// Applies the commitment rules one firing at a time, exploring every order in
// which enabled firings can be chosen, and returns every distinct resulting
// fluent set. Conditions read the state before the act and the facts derived
// so far for the act, as in the event calculus.
inline std::set<FluentSet> all_orders_results(const Taxonomy& tax, const FluentSet& g, const ActInstance& act) {
  const auto direct = act_effects(tax, act);
  struct Facts {
    FluentSet init, rule_init, rule_term;
  };
  auto is_init = [&](const Facts& s, const Fluent& f) { return direct.initiated.count(f) || s.rule_init.count(f); };

  auto firings = [&](const Facts& s) {
    std::vector<std::pair<int, Fluent>> out;
    FluentSet pool = g;
    pool.insert(direct.initiated.begin(), direct.initiated.end());
    pool.insert(s.rule_init.begin(), s.rule_init.end());
    for (const auto& f : pool) {
      if (s.rule_term.count(f)) continue;
      if (f.kind() == Fluent::Kind::Commitment && f.party() == act.sender && is_init(s, f.committed()))
        out.emplace_back(1, f);
      if (f.kind() == Fluent::Kind::ConditionalCommitment &&
          (is_init(s, f.trigger()) || (g.count(f.trigger()) && !direct.terminated.count(f.trigger()))))
        out.emplace_back(2, f);
    }
    return out;
  };
  auto finish = [&](const Facts& s) {
    FluentSet r;
    for (const auto& f : g)
      if (!direct.terminated.count(f) && !s.rule_term.count(f)) r.insert(f);
    for (const auto& f : direct.initiated)
      if (!s.rule_term.count(f)) r.insert(f);
    for (const auto& f : s.rule_init)
      if (!s.rule_term.count(f) && !direct.terminated.count(f)) r.insert(f);
    return r;
  };

  std::set<FluentSet> results;
  std::function<void(const Facts&, int)> explore = [&](const Facts& s, int depth) {
    const auto fs = firings(s);
    if (fs.empty() || depth > 32) {
      results.insert(finish(s));
      return;
    }
    for (const auto& [rule, f] : fs) {
      Facts next = s;
      next.rule_term.insert(f);
      if (rule == 2) next.rule_init.insert(Fluent::commitment(f.party(), f.counterparty(), f.committed()));
      explore(next, depth + 1);
    }
  };
  explore({}, 0);
  return results;
}

// Exhaustive search over every injective map covering the smaller side.
struct BruteMatching {
  bool exists = false;
  Rational total{0}, total_g{0};
};

inline BruteMatching brute_force_matching(const ComparisonTable& t) {
  const bool rows_p1 = t.rows <= t.cols;
  const std::size_t n = rows_p1 ? t.rows : t.cols, m = rows_p1 ? t.cols : t.rows;
  std::vector<std::size_t> cols(m);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  BruteMatching best;
  // Every permutation of the larger side; its first n entries give the map.
  do {
    Rational f(0), g(0);
    bool ok = true;
    for (std::size_t r = 0; r < n && ok; ++r) {
      const auto& c = rows_p1 ? t.at(r, cols[r]) : t.at(cols[r], r);
      ok = c.feasible;
      if (ok) {
        f += c.f;
        g += c.g;
      }
    }
    if (!ok) continue;
    if (!best.exists || f > best.total || (f == best.total && g > best.total_g)) best = {true, f, g};
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

// Largest pairing by (size, eq count, favoured count) over all partial
// injective pairings, for small trace sets.
inline Valuation brute_force_valuation(const Taxonomy& tax, const FluentSet& t1, const FluentSet& t2) {
  const std::vector<Fluent> a(t1.begin(), t1.end()), b(t2.begin(), t2.end());
  std::vector<bool> used(b.size(), false);
  Valuation best;
  bool have = false;
  Valuation cur;
  auto key = [](const Valuation& v) {
    return std::make_tuple(v.x0 + v.x1 + v.x2, v.x0, std::max(v.x1, v.x2));
  };
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == a.size()) {
      if (!have || key(cur) > key(best)) best = cur, have = true;
      return;
    }
    go(i + 1);
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const auto c = compare_fluents(tax, a[i], b[j]);
      if (c == FluentCase::In) continue;
      std::int64_t& slot = c == FluentCase::Eq ? cur.x0 : c == FluentCase::G1 ? cur.x1 : cur.x2;
      used[j] = true;
      ++slot;
      go(i + 1);
      --slot;
      used[j] = false;
    }
  };
  go(0);
  const auto n1 = static_cast<std::int64_t>(t1.size()), n2 = static_cast<std::int64_t>(t2.size());
  best.x3 = n1 > n2 ? n1 - n2 : n2 - n1;
  return best;
}

// ---------------------------------------------------------------------------
// Algebra fixtures: a flat taxonomy with enough act classes to keep built
// protocols deterministic.

inline Taxonomy algebra_taxonomy() {
  json classes = upper_acts();
  for (const char* f : {"fa", "fb", "fc", "fd", "fe"}) classes.push_back({{"name", f}, {"kind", "fluent"}});
  classes.push_back({{"name", "faa"}, {"kind", "fluent"}, {"parents", {"fa"}}});
  classes.push_back({{"name", "fbb"}, {"kind", "fluent"}, {"parents", {"fb"}}});
  classes.push_back({{"name", "fa2"}, {"kind", "fluent"}, {"equivalentTo", {"fa"}}});
  for (int i = 1; i <= 24; ++i)
    classes.push_back({{"name", "Say" + std::to_string(i)}, {"kind", "act"}, {"parents", {"Inform"}}});
  return load_taxonomy(json{{"classes", classes}});
}

// Inform-style act of class Say<k> carrying `content`.
inline ActInstance say(int k, const std::string& content) {
  return {ClassId("Say" + std::to_string(k)), "A", "B", ClassId(content), std::nullopt};
}

inline Protocol from_branches(const Taxonomy& tax, const std::string& id,
                              const std::vector<std::vector<ActInstance>>& seqs) {
  return protocol_from_sequences(id, seqs, &tax);
}

inline std::vector<std::vector<ActInstance>> sequences_of(const Protocol& p) {
  std::vector<std::vector<ActInstance>> out;
  for (const auto& b : enumerate_branches(p)) out.push_back(acts_of(b));
  return out;
}

inline std::string label_of(const Taxonomy& tax, const Protocol& a, const Protocol& b) {
  const auto l = classify(tax, a, b);
  return l ? l->to_string() : "-";
}

}  // namespace protorel::fixtures

#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "protorel/error.hpp"
#include "protorel/fluent.hpp"
#include "protorel/taxonomy.hpp"

namespace protorel {

// One delivered message: act class plus the bindings for its role variables.
// Contents are opaque references to fluent classes.
struct ActInstance {
  ClassId act_class;
  std::string sender;
  std::string receiver;
  ClassId content;
  std::optional<ClassId> in_reply_to;

  friend bool operator==(const ActInstance&, const ActInstance&) = default;

  std::string to_string() const {
    std::string s = act_class.name + "(" + sender + "->" + receiver + ", " + content.name;
    if (in_reply_to) s += ", re " + in_reply_to->name;
    return s + ")";
  }
};

struct Transition {
  std::string from;
  ActInstance act;
  std::string to;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Deterministic acyclic state-transition system. Construct through
// load_protocol or make_protocol, which enforce the structural invariants.
class Protocol {
 public:
  const std::string& id() const { return id_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::string& initial() const { return initial_; }
  const std::vector<std::string>& finals() const { return finals_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  bool is_final(std::string_view s) const {
    return std::find(finals_.begin(), finals_.end(), s) != finals_.end();
  }

  // Outgoing transitions ordered by (target name, act class name).
  std::vector<const Transition*> outgoing(std::string_view s) const {
    std::vector<const Transition*> out;
    for (const auto& t : transitions_)
      if (t.from == s) out.push_back(&t);
    std::sort(out.begin(), out.end(), [](const Transition* a, const Transition* b) {
      return std::tie(a->to, a->act.act_class.name) < std::tie(b->to, b->act.act_class.name);
    });
    return out;
  }

  friend bool operator==(const Protocol&, const Protocol&) = default;

 private:
  friend std::vector<Diagnostic> validate_protocol(const Protocol&, const Taxonomy*);
  friend Protocol make_protocol(std::string, std::vector<std::string>, std::string,
                                std::vector<std::string>, std::vector<Transition>,
                                const Taxonomy*);

  std::string id_;
  std::vector<std::string> states_;
  std::string initial_;
  std::vector<std::string> finals_;
  std::vector<Transition> transitions_;
};

// A transition sequence. `start` names the first state so that an empty
// branch (the result of a full prune) still knows where it sits.
struct Branch {
  std::string protocol_id;
  std::string start;
  std::vector<Transition> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }

  std::vector<std::string> states() const {
    std::vector<std::string> out{start};
    for (const auto& t : steps) out.push_back(t.to);
    return out;
  }

  friend bool operator==(const Branch&, const Branch&) = default;
};

// Prune[B/s_k]: the first k transitions.
inline Branch prune(const Branch& b, std::size_t k) {
  if (k > b.size())
    throw Error(Errc::index_out_of_range,
                "prune index " + std::to_string(k) + " beyond branch length " + std::to_string(b.size()));
  Branch out{b.protocol_id, b.start, {}};
  out.steps.assign(b.steps.begin(), b.steps.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

// ChangeInit[B/s_k]: the transitions after state k, starting at s_k.
inline Branch change_init(const Branch& b, std::size_t k) {
  if (k > b.size())
    throw Error(Errc::index_out_of_range,
                "change-init index " + std::to_string(k) + " beyond branch length " +
                    std::to_string(b.size()));
  Branch out{b.protocol_id, k == 0 ? b.start : b.steps[k - 1].to, {}};
  out.steps.assign(b.steps.begin() + static_cast<std::ptrdiff_t>(k), b.steps.end());
  return out;
}

inline Branch concat(const Branch& head, const Branch& tail) {
  Branch out = head;
  out.steps.insert(out.steps.end(), tail.steps.begin(), tail.steps.end());
  return out;
}

namespace detail {

inline void check_act(const ActInstance& act, const Taxonomy& tax, const std::string& where,
                      std::vector<Diagnostic>& out) {
  if (!tax.contains(act.act_class) || tax.kind(act.act_class) != ClassKind::Act) {
    out.push_back({Errc::unknown_act_class, where + ": '" + act.act_class.name + "' is not an act class"});
    return;
  }
  if (!tax.is_fluent_class(act.content))
    out.push_back({Errc::unknown_content_class,
                   where + ": content '" + act.content.name + "' is not a fluent class"});
  if (act.in_reply_to && !tax.is_fluent_class(*act.in_reply_to))
    out.push_back({Errc::unknown_content_class,
                   where + ": inReplyToContent '" + act.in_reply_to->name + "' is not a fluent class"});
  const bool wants_reply = tax.uses_role(act.act_class, Role::InReplyToContent);
  if (wants_reply != act.in_reply_to.has_value())
    out.push_back({Errc::reply_content_mismatch,
                   where + ": " + act.act_class.name +
                       (wants_reply ? " requires inReplyToContent" : " takes no inReplyToContent")});
}

}  // namespace detail

// Every invariant violation found, in a stable order. `tax` may be null, in
// which case only structural checks run.
inline std::vector<Diagnostic> validate_protocol(const Protocol& p, const Taxonomy* tax) {
  std::vector<Diagnostic> out;
  std::map<std::string, std::size_t> idx;
  for (const auto& s : p.states_) {
    if (!idx.emplace(s, idx.size()).second)
      out.push_back({Errc::duplicate_state, "state '" + s + "' declared twice"});
  }
  if (!idx.count(p.initial_))
    out.push_back({Errc::unknown_state, "initial state '" + p.initial_ + "' is not declared"});
  if (p.finals_.empty()) out.push_back({Errc::no_final_state, "protocol has no final state"});
  for (const auto& f : p.finals_)
    if (!idx.count(f)) out.push_back({Errc::unknown_state, "final state '" + f + "' is not declared"});

  bool edges_ok = true;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < p.transitions_.size(); ++i) {
    const auto& t = p.transitions_[i];
    const std::string where = "transition " + t.from + "->" + t.to;
    if (!idx.count(t.from) || !idx.count(t.to)) {
      out.push_back({Errc::unknown_state, where + ": endpoint is not declared"});
      edges_ok = false;
    }
    if (t.act.sender.empty() || t.act.receiver.empty())
      out.push_back({Errc::empty_actor, where + ": sender and receiver must be non-empty"});
    if (!seen.emplace(t.from, t.act.act_class.name).second)
      out.push_back({Errc::nondeterministic_transition,
                     "state '" + t.from + "' has two transitions labelled " + t.act.act_class.name});
    if (tax) detail::check_act(t.act, *tax, where, out);
  }
  if (!edges_ok || !idx.count(p.initial_)) return out;

  // Graph over distinct state names; duplicates were reported above.
  const std::size_t n = idx.size();
  std::vector<std::string> name(n);
  for (const auto& [s, i] : idx) name[i] = s;
  std::vector<std::vector<std::size_t>> succ(n), pred(n);
  for (const auto& t : p.transitions_) {
    succ[idx.at(t.from)].push_back(idx.at(t.to));
    pred[idx.at(t.to)].push_back(idx.at(t.from));
  }

  std::vector<int> color(n, 0);
  bool cyclic = false;
  auto dfs = [&](auto&& self, std::size_t v) -> void {
    color[v] = 1;
    for (std::size_t w : succ[v]) {
      if (color[w] == 1 && !cyclic) {
        cyclic = true;
        out.push_back({Errc::cycle_detected,
                       "transition " + name[v] + "->" + name[w] + " closes a cycle"});
      } else if (color[w] == 0) {
        self(self, w);
      }
    }
    color[v] = 2;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (color[v] == 0) dfs(dfs, v);

  auto reach = [n](std::vector<std::size_t> seeds, const std::vector<std::vector<std::size_t>>& g) {
    std::vector<bool> seen(n, false);
    for (auto s : seeds) seen[s] = true;
    while (!seeds.empty()) {
      auto v = seeds.back();
      seeds.pop_back();
      for (auto w : g[v]) {
        if (seen[w]) continue;
        seen[w] = true;
        seeds.push_back(w);
      }
    }
    return seen;
  };
  const auto from_init = reach({idx.at(p.initial_)}, succ);
  std::vector<std::size_t> final_idx;
  for (const auto& f : p.finals_)
    if (idx.count(f)) final_idx.push_back(idx.at(f));
  const auto to_final = reach(final_idx, pred);
  for (std::size_t v = 0; v < n; ++v) {
    if (!from_init[v])
      out.push_back({Errc::unreachable_state, "state '" + name[v] + "' is unreachable"});
    else if (!to_final[v] && !final_idx.empty())
      out.push_back({Errc::dead_end_state,
                     "state '" + name[v] + "' cannot reach a final state"});
  }
  return out;
}

// Builds a protocol and throws Error carrying every diagnostic when invalid.
inline Protocol make_protocol(std::string id, std::vector<std::string> states, std::string initial,
                              std::vector<std::string> finals, std::vector<Transition> transitions,
                              const Taxonomy* tax) {
  Protocol p;
  p.id_ = std::move(id);
  p.states_ = std::move(states);
  p.initial_ = std::move(initial);
  p.finals_ = std::move(finals);
  p.transitions_ = std::move(transitions);
  auto diags = validate_protocol(p, tax);
  if (!diags.empty()) throw Error(std::move(diags));
  return p;
}

namespace detail {

inline std::string req_string(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_string())
    throw Error(Errc::schema_error, where + ": missing string '" + key + "'");
  return obj.at(key).get<std::string>();
}

inline ActInstance act_from_json(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"class", "sender", "receiver", "content", "inReplyToContent"}, where);
  ActInstance a;
  a.act_class = ClassId(req_string(j, "class", where));
  a.sender = req_string(j, "sender", where);
  a.receiver = req_string(j, "receiver", where);
  a.content = ClassId(req_string(j, "content", where));
  if (j.contains("inReplyToContent")) a.in_reply_to = ClassId(req_string(j, "inReplyToContent", where));
  return a;
}

}  // namespace detail

inline nlohmann::json to_json(const ActInstance& a) {
  nlohmann::json j = {{"class", a.act_class.name},
                      {"sender", a.sender},
                      {"receiver", a.receiver},
                      {"content", a.content.name}};
  if (a.in_reply_to) j["inReplyToContent"] = a.in_reply_to->name;
  return j;
}

inline nlohmann::json to_json(const Protocol& p) {
  nlohmann::json ts = nlohmann::json::array();
  for (const auto& t : p.transitions()) ts.push_back({{"from", t.from}, {"to", t.to}, {"act", to_json(t.act)}});
  return {{"id", p.id()},
          {"states", p.states()},
          {"initial", p.initial()},
          {"finals", p.finals()},
          {"transitions", ts}};
}

inline Protocol load_protocol(const nlohmann::json& doc, const Taxonomy* tax) {
  using detail::check_keys;
  using detail::req_string;
  check_keys(doc, {"id", "states", "initial", "finals", "transitions"}, "protocol");
  const auto id = req_string(doc, "id", "protocol");
  const auto states = detail::string_list(doc, "states", "protocol");
  const auto initial = req_string(doc, "initial", "protocol");
  const auto finals = detail::string_list(doc, "finals", "protocol");
  std::vector<Transition> ts;
  if (doc.contains("transitions")) {
    const auto& arr = doc.at("transitions");
    if (!arr.is_array()) throw Error(Errc::schema_error, "protocol: 'transitions' must be a list");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "transition #" + std::to_string(i);
      check_keys(arr[i], {"from", "to", "act"}, where);
      if (!arr[i].contains("act")) throw Error(Errc::schema_error, where + ": missing 'act'");
      ts.push_back({req_string(arr[i], "from", where), detail::act_from_json(arr[i].at("act"), where),
                    req_string(arr[i], "to", where)});
    }
  }
  return make_protocol(id, states, initial, finals, std::move(ts), tax);
}

inline Protocol load_protocol(const nlohmann::json& doc, const Taxonomy& tax) {
  return load_protocol(doc, &tax);
}

inline nlohmann::json parse_json_document(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::schema_error, std::string(what) + " is not valid JSON: " + e.what());
  }
}

inline Protocol load_protocol_file(const std::filesystem::path& path, const Taxonomy* tax) {
  return load_protocol(parse_json_document(read_file(path), path.string()), tax);
}

// Builds a tree-shaped protocol whose branches are exactly the given act
// sequences. Shared prefixes are merged; a sequence that is a prefix of
// another ends in an inner final state. Throws nondeterministic-transition
// when two sequences diverge on different instances of one act class.
inline Protocol protocol_from_sequences(std::string id, const std::vector<std::vector<ActInstance>>& seqs,
                                        const Taxonomy* tax) {
  std::vector<std::string> states{"s0"};
  std::vector<std::string> finals;
  std::vector<Transition> ts;
  for (const auto& seq : seqs) {
    std::string cur = "s0";
    for (const auto& act : seq) {
      auto it = std::find_if(ts.begin(), ts.end(), [&](const Transition& t) {
        return t.from == cur && t.act.act_class == act.act_class;
      });
      if (it != ts.end()) {
        if (!(it->act == act))
          throw Error(Errc::nondeterministic_transition,
                      "sequences diverge on two instances of " + act.act_class.name);
        cur = it->to;
        continue;
      }
      std::string next = "s" + std::to_string(states.size());
      states.push_back(next);
      ts.push_back({cur, act, next});
      cur = next;
    }
    if (std::find(finals.begin(), finals.end(), cur) == finals.end()) finals.push_back(cur);
  }
  return make_protocol(std::move(id), std::move(states), "s0", std::move(finals), std::move(ts), tax);
}

inline std::vector<ActInstance> acts_of(const Branch& b) {
  std::vector<ActInstance> out;
  for (const auto& t : b.steps) out.push_back(t.act);
  return out;
}

}  // namespace protorel

#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "protorel/error.hpp"
#include "protorel/fluent.hpp"

namespace protorel {

enum class ClassKind { Act, Fluent };

// Role variables an effect template may mention. They are bound from the
// fields of a concrete act instance.
enum class Role { Sender, Receiver, Content, InReplyToContent };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::Sender: return "sender";
    case Role::Receiver: return "receiver";
    case Role::Content: return "content";
    case Role::InReplyToContent: return "inReplyToContent";
  }
  return "";
}

inline std::optional<Role> parse_role(std::string_view s) {
  if (s == "sender") return Role::Sender;
  if (s == "receiver") return Role::Receiver;
  if (s == "content") return Role::Content;
  if (s == "inReplyToContent") return Role::InReplyToContent;
  return std::nullopt;
}

enum class EffectKind { Initiates, Terminates };

// A fluent constructor whose leaves are role variables or fixed classes.
//   Domain:               term is the content role or a fixed fluent class
//   Acceptance/Rejection: party/counterparty are actor roles, term is the object
//   Commitment:           party/counterparty, nested = [committed]
//   Conditional:          party/counterparty, nested = [committed, trigger]
struct FluentPattern {
  Fluent::Kind kind = Fluent::Kind::Domain;
  std::variant<Role, ClassId> term = Role::Content;
  Role party = Role::Sender;
  Role counterparty = Role::Receiver;
  std::vector<FluentPattern> nested;

  friend bool operator==(const FluentPattern&, const FluentPattern&) = default;

  bool references(Role r) const {
    switch (kind) {
      case Fluent::Kind::Domain:
        return std::holds_alternative<Role>(term) && std::get<Role>(term) == r;
      case Fluent::Kind::Acceptance:
      case Fluent::Kind::Rejection:
        return party == r || counterparty == r ||
               (std::holds_alternative<Role>(term) && std::get<Role>(term) == r);
      case Fluent::Kind::Commitment:
      case Fluent::Kind::ConditionalCommitment:
        return party == r || counterparty == r ||
               std::any_of(nested.begin(), nested.end(),
                           [r](const FluentPattern& p) { return p.references(r); });
    }
    return false;
  }
};

struct EffectTemplate {
  EffectKind kind = EffectKind::Initiates;
  FluentPattern pattern;

  friend bool operator==(const EffectTemplate&, const EffectTemplate&) = default;
};

// Flattened class hierarchy for communication acts and fluents. Immutable
// once loaded; every query is a lookup into closures computed at load time.
class Taxonomy {
 public:
  static constexpr std::string_view kActRoot = "CommunicationAct";
  static constexpr std::string_view kFluentRoot = "Fluent";

  std::size_t size() const { return names_.size(); }

  std::vector<ClassId> classes() const {
    std::vector<ClassId> out;
    out.reserve(names_.size());
    for (const auto& n : names_) out.emplace_back(n);
    return out;
  }

  bool contains(const ClassId& c) const { return index_.count(c.name) != 0; }

  ClassKind kind(const ClassId& c) const { return kinds_[require(c)]; }

  bool is_act(const ClassId& c) const { return contains(c) && kind(c) == ClassKind::Act; }
  bool is_fluent_class(const ClassId& c) const {
    return contains(c) && kind(c) == ClassKind::Fluent;
  }

  // True iff `specific` is below `general` in the reflexive, transitive,
  // equivalence-respecting closure.
  bool subsumes(const ClassId& general, const ClassId& specific) const {
    const std::size_t g = require(general);
    const std::size_t s = require(specific);
    return ancestors_[cluster_[s]][cluster_[g]];
  }

  bool equivalent(const ClassId& a, const ClassId& b) const {
    return cluster_[require(a)] == cluster_[require(b)];
  }

  // Most specific of the asserted classes; equivalent minima collapse to the
  // first one listed.
  ClassId msc(std::span<const ClassId> asserted) const {
    if (asserted.empty()) throw Error(Errc::no_asserted_class, "instance has no asserted class");
    std::vector<ClassId> minimal;
    for (const auto& c : asserted) {
      require(c);
      bool is_min = std::none_of(asserted.begin(), asserted.end(), [&](const ClassId& d) {
        return subsumes(c, d) && !equivalent(c, d);
      });
      if (is_min) minimal.push_back(c);
    }
    for (const auto& c : minimal) {
      if (!equivalent(c, minimal.front()))
        throw Error(Errc::ambiguous_msc,
                    "incomparable classes " + minimal.front().name + " and " + c.name);
    }
    return minimal.front();
  }

  const std::vector<ClassId>& parents(const ClassId& c) const { return parents_[require(c)]; }

  const std::optional<std::string>& layer(const ClassId& c) const { return layers_[require(c)]; }

  const std::vector<EffectTemplate>& own_effects(const ClassId& c) const {
    return own_effects_[require(c)];
  }

  // Own templates followed by every inherited one, without duplicates.
  const std::vector<EffectTemplate>& effective_effects(const ClassId& c) const {
    return effective_effects_[require(c)];
  }

  // Whether any effective template of `act` mentions the role.
  bool uses_role(const ClassId& act, Role r) const {
    const auto& effs = effective_effects(act);
    return std::any_of(effs.begin(), effs.end(),
                       [r](const EffectTemplate& e) { return e.pattern.references(r); });
  }

 private:
  friend Taxonomy load_taxonomy(const nlohmann::json& doc);

  std::size_t require(const ClassId& c) const {
    auto it = index_.find(c.name);
    if (it == index_.end()) throw Error(Errc::unknown_class, "unknown class '" + c.name + "'");
    return it->second;
  }

  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<ClassKind> kinds_;
  std::vector<std::vector<ClassId>> parents_;
  std::vector<std::optional<std::string>> layers_;
  std::vector<std::size_t> cluster_;
  std::vector<std::vector<bool>> ancestors_;  // [cluster][cluster]
  std::vector<std::vector<EffectTemplate>> own_effects_;
  std::vector<std::vector<EffectTemplate>> effective_effects_;
};

namespace detail {

inline bool is_reserved_fluent_name(std::string_view n) {
  return n == "Commitment" || n == "ConditionalCommitment" || n == "Acceptance" ||
         n == "Rejection";
}

inline bool is_valid_name(std::string_view n) {
  if (n.empty()) return false;
  return std::none_of(n.begin(), n.end(), [](char c) {
    return c == '(' || c == ')' || c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '"';
  });
}

inline void check_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw Error(Errc::schema_error, where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(Errc::schema_error, where + ": unknown key '" + key + "'");
  }
}

inline std::vector<std::string> string_list(const nlohmann::json& obj, const char* key,
                                            const std::string& where) {
  std::vector<std::string> out;
  if (!obj.contains(key)) return out;
  const auto& arr = obj.at(key);
  if (!arr.is_array()) throw Error(Errc::schema_error, where + ": '" + key + "' must be a list");
  for (const auto& v : arr) {
    if (!v.is_string())
      throw Error(Errc::schema_error, where + ": '" + key + "' entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

class PatternReader {
 public:
  PatternReader(const Taxonomy& tax, std::string where) : tax_(tax), where_(std::move(where)) {}

  FluentPattern fluent(const nlohmann::json& j) const {
    if (j.is_string()) {
      const auto name = j.get<std::string>();
      auto role = parse_role(name);
      if (!role) throw Error(Errc::unknown_role, where_ + ": unknown role '" + name + "'");
      if (*role == Role::Sender || *role == Role::Receiver)
        throw Error(Errc::invalid_effect_pattern,
                    where_ + ": actor role '" + name + "' cannot stand for a fluent");
      FluentPattern p;
      p.kind = Fluent::Kind::Domain;
      p.term = *role;
      return p;
    }
    check_keys(j, {"class", "args"}, where_);
    if (!j.contains("class") || !j.at("class").is_string())
      throw Error(Errc::invalid_effect_pattern, where_ + ": fluent pattern needs a 'class'");
    const auto cls = j.at("class").get<std::string>();
    const nlohmann::json args = j.value("args", nlohmann::json::object());
    if (!args.is_object())
      throw Error(Errc::invalid_effect_pattern, where_ + ": 'args' must be an object");

    FluentPattern p;
    if (cls == "Commitment" || cls == "ConditionalCommitment") {
      const bool cond = cls == "ConditionalCommitment";
      if (cond)
        expect_args(args, {"debtor", "creditor", "condition", "trigger"});
      else
        expect_args(args, {"debtor", "creditor", "condition"});
      p.kind = cond ? Fluent::Kind::ConditionalCommitment : Fluent::Kind::Commitment;
      p.party = actor(args.at("debtor"));
      p.counterparty = actor(args.at("creditor"));
      p.nested.push_back(fluent(args.at("condition")));
      if (cond) p.nested.push_back(fluent(args.at("trigger")));
      return p;
    }
    if (cls == "Acceptance" || cls == "Rejection") {
      expect_args(args, {"signatory", "addressee", "object"});
      p.kind = cls == "Acceptance" ? Fluent::Kind::Acceptance : Fluent::Kind::Rejection;
      p.party = actor(args.at("signatory"));
      p.counterparty = actor(args.at("addressee"));
      p.term = object(args.at("object"));
      return p;
    }
    if (!args.empty())
      throw Error(Errc::invalid_effect_pattern,
                  where_ + ": domain fluent '" + cls + "' takes no arguments");
    p.kind = Fluent::Kind::Domain;
    p.term = fluent_class(cls);
    return p;
  }

 private:
  void expect_args(const nlohmann::json& args, std::initializer_list<std::string_view> names) const {
    check_keys(args, names, where_);
    for (auto n : names) {
      if (!args.contains(std::string(n)))
        throw Error(Errc::invalid_effect_pattern,
                    where_ + ": missing argument '" + std::string(n) + "'");
    }
  }

  Role actor(const nlohmann::json& j) const {
    if (!j.is_string())
      throw Error(Errc::invalid_effect_pattern, where_ + ": actor argument must be a role name");
    const auto name = j.get<std::string>();
    auto role = parse_role(name);
    if (!role) throw Error(Errc::unknown_role, where_ + ": unknown role '" + name + "'");
    if (*role != Role::Sender && *role != Role::Receiver)
      throw Error(Errc::invalid_effect_pattern,
                  where_ + ": '" + name + "' is not an actor role");
    return *role;
  }

  std::variant<Role, ClassId> object(const nlohmann::json& j) const {
    if (j.is_string()) {
      const auto name = j.get<std::string>();
      auto role = parse_role(name);
      if (!role) throw Error(Errc::unknown_role, where_ + ": unknown role '" + name + "'");
      if (*role == Role::Sender || *role == Role::Receiver)
        throw Error(Errc::invalid_effect_pattern,
                    where_ + ": actor role '" + name + "' cannot be an object");
      return *role;
    }
    check_keys(j, {"class"}, where_);
    if (!j.contains("class") || !j.at("class").is_string())
      throw Error(Errc::invalid_effect_pattern, where_ + ": object needs a 'class'");
    return fluent_class(j.at("class").get<std::string>());
  }

  ClassId fluent_class(const std::string& name) const {
    ClassId c(name);
    if (!tax_.contains(c)) throw Error(Errc::unknown_class, where_ + ": unknown class '" + name + "'");
    if (tax_.kind(c) != ClassKind::Fluent)
      throw Error(Errc::kind_mismatch, where_ + ": '" + name + "' is not a fluent class");
    return c;
  }

  const Taxonomy& tax_;
  std::string where_;
};

}  // namespace detail

inline Taxonomy load_taxonomy(const nlohmann::json& doc) {
  using detail::check_keys;
  check_keys(doc, {"classes"}, "taxonomy");
  const nlohmann::json classes = doc.value("classes", nlohmann::json::array());
  if (!classes.is_array()) throw Error(Errc::schema_error, "taxonomy: 'classes' must be a list");

  Taxonomy t;
  auto add = [&t](const std::string& name, ClassKind k) {
    t.index_.emplace(name, t.names_.size());
    t.names_.push_back(name);
    t.kinds_.push_back(k);
    t.parents_.emplace_back();
    t.layers_.emplace_back();
    t.own_effects_.emplace_back();
  };
  add(std::string(Taxonomy::kActRoot), ClassKind::Act);
  add(std::string(Taxonomy::kFluentRoot), ClassKind::Fluent);

  // Pass 1: names and kinds.
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    const std::string where = "class #" + std::to_string(i);
    check_keys(c, {"name", "parents", "equivalentTo", "kind", "effects", "layer"}, where);
    if (!c.contains("name") || !c.at("name").is_string())
      throw Error(Errc::schema_error, where + ": missing 'name'");
    const auto name = c.at("name").get<std::string>();
    if (!detail::is_valid_name(name))
      throw Error(Errc::schema_error, where + ": invalid class name '" + name + "'");
    if (detail::is_reserved_fluent_name(name))
      throw Error(Errc::reserved_class_name, "'" + name + "' is a built-in fluent kind");
    if (t.index_.count(name)) throw Error(Errc::duplicate_class, "duplicate class '" + name + "'");
    if (!c.contains("kind") || !c.at("kind").is_string())
      throw Error(Errc::schema_error, name + ": missing 'kind'");
    const auto kind = c.at("kind").get<std::string>();
    if (kind != "act" && kind != "fluent")
      throw Error(Errc::schema_error, name + ": kind must be 'act' or 'fluent'");
    add(name, kind == "act" ? ClassKind::Act : ClassKind::Fluent);
    if (c.contains("layer")) {
      if (!c.at("layer").is_string()) throw Error(Errc::schema_error, name + ": 'layer' must be a string");
      t.layers_.back() = c.at("layer").get<std::string>();
    }
  }

  // Pass 2: parents and equivalences.
  const std::size_t n = t.names_.size();
  std::vector<std::size_t> uf(n);
  std::iota(uf.begin(), uf.end(), std::size_t{0});
  auto find = [&uf](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  auto lookup = [&t](const std::string& name, Errc err, const std::string& owner) {
    auto it = t.index_.find(name);
    if (it == t.index_.end())
      throw Error(err, owner + ": unknown class '" + name + "'");
    return it->second;
  };
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    const std::size_t self = i + 2;
    const std::string& name = t.names_[self];
    for (const auto& p : detail::string_list(c, "parents", name)) {
      const std::size_t pi = lookup(p, Errc::unknown_parent, name);
      if (t.kinds_[pi] != t.kinds_[self])
        throw Error(Errc::kind_mismatch, name + ": parent '" + p + "' has a different kind");
      t.parents_[self].emplace_back(p);
    }
    if (t.parents_[self].empty())
      t.parents_[self].emplace_back(std::string(t.kinds_[self] == ClassKind::Act
                                                    ? Taxonomy::kActRoot
                                                    : Taxonomy::kFluentRoot));
    for (const auto& e : detail::string_list(c, "equivalentTo", name)) {
      const std::size_t ei = lookup(e, Errc::unknown_class, name);
      if (t.kinds_[ei] != t.kinds_[self])
        throw Error(Errc::kind_mismatch, name + ": equivalent '" + e + "' has a different kind");
      uf[find(self)] = find(ei);
    }
  }

  // Compact cluster ids.
  std::map<std::size_t, std::size_t> compact;
  t.cluster_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, _] = compact.emplace(find(i), compact.size());
    t.cluster_[i] = it->second;
  }
  const std::size_t m = compact.size();
  std::vector<std::vector<std::size_t>> up(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : t.parents_[i]) {
      const std::size_t a = t.cluster_[i], b = t.cluster_[t.index_.at(p.name)];
      if (a != b) up[a].push_back(b);
    }
  }

  // Cycle check and ancestor closure over the cluster graph.
  std::vector<int> color(m, 0);
  t.ancestors_.assign(m, std::vector<bool>(m, false));
  std::vector<std::size_t> order;
  auto cluster_names = [&](std::size_t cl) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i)
      if (t.cluster_[i] == cl) s += (s.empty() ? "" : "=") + t.names_[i];
    return s;
  };
  auto visit = [&](auto&& self, std::size_t v) -> void {
    color[v] = 1;
    for (std::size_t w : up[v]) {
      if (color[w] == 1)
        throw Error(Errc::cycle_in_hierarchy,
                    "subsumption cycle through " + cluster_names(v) + " and " + cluster_names(w));
      if (color[w] == 0) self(self, w);
    }
    color[v] = 2;
    order.push_back(v);
  };
  for (std::size_t v = 0; v < m; ++v)
    if (color[v] == 0) visit(visit, v);
  for (std::size_t v : order) {  // parents before children
    t.ancestors_[v][v] = true;
    for (std::size_t w : up[v])
      for (std::size_t k = 0; k < m; ++k)
        if (t.ancestors_[w][k]) t.ancestors_[v][k] = true;
  }

  // Pass 3: effect templates.
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    const std::size_t self = i + 2;
    const std::string& name = t.names_[self];
    if (!c.contains("effects")) continue;
    const auto& effs = c.at("effects");
    if (!effs.is_array()) throw Error(Errc::schema_error, name + ": 'effects' must be a list");
    if (!effs.empty() && t.kinds_[self] != ClassKind::Act)
      throw Error(Errc::kind_mismatch, name + ": only act classes carry effects");
    for (std::size_t k = 0; k < effs.size(); ++k) {
      const std::string where = name + " effect #" + std::to_string(k);
      check_keys(effs[k], {"kind", "fluent"}, where);
      if (!effs[k].contains("kind") || !effs[k].at("kind").is_string() || !effs[k].contains("fluent"))
        throw Error(Errc::schema_error, where + ": needs 'kind' and 'fluent'");
      const auto kind = effs[k].at("kind").get<std::string>();
      if (kind != "initiates" && kind != "terminates")
        throw Error(Errc::schema_error, where + ": kind must be 'initiates' or 'terminates'");
      EffectTemplate e;
      e.kind = kind == "initiates" ? EffectKind::Initiates : EffectKind::Terminates;
      e.pattern = detail::PatternReader(t, where).fluent(effs[k].at("fluent"));
      t.own_effects_[self].push_back(std::move(e));
    }
  }

  t.effective_effects_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& out = t.effective_effects_[i];
    auto append = [&out](const std::vector<EffectTemplate>& src) {
      for (const auto& e : src)
        if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    };
    append(t.own_effects_[i]);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && t.ancestors_[t.cluster_[i]][t.cluster_[j]]) append(t.own_effects_[j]);
  }
  return t;
}

inline Taxonomy parse_taxonomy(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::schema_error, std::string("taxonomy is not valid JSON: ") + e.what());
  }
  return load_taxonomy(doc);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Taxonomy load_taxonomy_file(const std::filesystem::path& path) {
  return parse_taxonomy(read_file(path));
}

}  // namespace protorel

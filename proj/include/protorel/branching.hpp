#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "protorel/derivation.hpp"
#include "protorel/protocol.hpp"
#include "protorel/taxonomy.hpp"

namespace protorel {

// All paths from the initial state to a final state. Successors are visited
// in (target name, act class) order, so the result is stable across runs and
// independent of the order transitions were declared in.
//
// A final state with outgoing transitions closes one branch and also lets the
// path continue.
inline std::vector<Branch> enumerate_branches(const Protocol& p) {
  std::vector<Branch> out;
  Branch cur{p.id(), p.initial(), {}};
  auto walk = [&](auto&& self, const std::string& s) -> void {
    if (p.is_final(s)) out.push_back(cur);
    for (const Transition* t : p.outgoing(s)) {
      cur.steps.push_back(*t);
      self(self, t->to);
      cur.steps.pop_back();
    }
  };
  walk(walk, p.initial());
  return out;
}

inline std::vector<DerivedBranch> derive_all(const Taxonomy& tax, const Protocol& p) {
  std::vector<DerivedBranch> out;
  for (const auto& b : enumerate_branches(p)) out.push_back(derive(tax, b));
  return out;
}

// Public handle of a branch: B<protocol ordinal>.<1-based index>.
inline std::string branch_label(std::size_t protocol_ordinal, std::size_t index) {
  return "B" + std::to_string(protocol_ordinal) + "." + std::to_string(index + 1);
}

inline std::string path_string(const Branch& b) {
  std::string s = "[";
  bool first = true;
  for (const auto& st : b.states()) {
    if (!first) s += ",";
    s += st;
    first = false;
  }
  return s + "]";
}

}  // namespace protorel

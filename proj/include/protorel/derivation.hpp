#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "protorel/error.hpp"
#include "protorel/fluent.hpp"
#include "protorel/protocol.hpp"
#include "protorel/taxonomy.hpp"

namespace protorel {

struct ActEffects {
  FluentSet initiated;
  FluentSet terminated;
};

namespace detail {

inline const std::string& bind_actor(Role r, const ActInstance& act) {
  if (r == Role::Sender) return act.sender;
  if (r == Role::Receiver) return act.receiver;
  throw Error(Errc::unbound_role, "role '" + std::string(to_string(r)) + "' is not an actor");
}

inline ClassId bind_class(const std::variant<Role, ClassId>& term, const ActInstance& act) {
  if (const auto* c = std::get_if<ClassId>(&term)) return *c;
  switch (std::get<Role>(term)) {
    case Role::Content: return act.content;
    case Role::InReplyToContent:
      if (!act.in_reply_to)
        throw Error(Errc::unbound_role, act.to_string() + " has no inReplyToContent");
      return *act.in_reply_to;
    default:
      throw Error(Errc::unbound_role, "actor role used where a class is expected");
  }
}

inline Fluent instantiate(const FluentPattern& p, const ActInstance& act) {
  switch (p.kind) {
    case Fluent::Kind::Domain: return Fluent::domain(bind_class(p.term, act));
    case Fluent::Kind::Acceptance:
      return Fluent::acceptance(bind_actor(p.party, act), bind_actor(p.counterparty, act),
                                bind_class(p.term, act));
    case Fluent::Kind::Rejection:
      return Fluent::rejection(bind_actor(p.party, act), bind_actor(p.counterparty, act),
                               bind_class(p.term, act));
    case Fluent::Kind::Commitment:
      return Fluent::commitment(bind_actor(p.party, act), bind_actor(p.counterparty, act),
                                instantiate(p.nested.at(0), act));
    case Fluent::Kind::ConditionalCommitment:
      return Fluent::conditional(bind_actor(p.party, act), bind_actor(p.counterparty, act),
                                 instantiate(p.nested.at(1), act), instantiate(p.nested.at(0), act));
  }
  throw Error(Errc::invalid_effect_pattern, "unknown pattern kind");
}

}  // namespace detail

// Direct effects of an act: every effective template of its class with the
// role variables bound. Commitment rules are not applied here.
inline ActEffects act_effects(const Taxonomy& tax, const ActInstance& act) {
  ActEffects out;
  for (const auto& e : tax.effective_effects(act.act_class)) {
    Fluent f = detail::instantiate(e.pattern, act);
    (e.kind == EffectKind::Initiates ? out.initiated : out.terminated).insert(std::move(f));
  }
  return out;
}

// What a single step does to the fluent set, split by cause.
struct StepEffects {
  FluentSet initiated;        // by the act's templates
  FluentSet terminated;       // by the act's templates
  FluentSet rule_initiated;   // base commitments produced by Rule 2
  FluentSet rule_terminated;  // commitments discharged by Rule 1 or detached by Rule 2
};

// Runs the commitment rules to fixpoint over the act's direct effects.
//
// Rule 1: C(x,y,p) in force or just created, x is the sender, p initiated now
//         -> C is discharged.
// Rule 2: CC(x,y,c,p) in force or just created, and c is initiated now or
//         still holds -> CC is detached into C(x,y,p).
//
// Both rules only ever add to the derived sets, so the fixpoint does not
// depend on the order in which firings are tried.
inline StepEffects step_effects(const Taxonomy& tax, const FluentSet& g, const ActInstance& act) {
  auto direct = act_effects(tax, act);
  StepEffects s{std::move(direct.initiated), std::move(direct.terminated), {}, {}};

  auto initiated = [&s](const Fluent& f) {
    return s.initiated.count(f) != 0 || s.rule_initiated.count(f) != 0;
  };
  auto still_holds = [&](const Fluent& f) { return g.count(f) != 0 && s.terminated.count(f) == 0; };

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Fluent> candidates(g.begin(), g.end());
    candidates.insert(candidates.end(), s.initiated.begin(), s.initiated.end());
    candidates.insert(candidates.end(), s.rule_initiated.begin(), s.rule_initiated.end());
    for (const auto& f : candidates) {
      if (s.rule_terminated.count(f)) continue;
      if (f.is_commitment() && f.party() == act.sender && initiated(f.committed())) {
        s.rule_terminated.insert(f);
        changed = true;
      } else if (f.is_conditional() && (initiated(f.trigger()) || still_holds(f.trigger()))) {
        s.rule_terminated.insert(f);
        s.rule_initiated.insert(Fluent::commitment(f.party(), f.counterparty(), f.committed()));
        changed = true;
      }
    }
  }
  return s;
}

// G' = (G minus everything terminated) plus the surviving initiations. A
// direct initiation beats a direct termination of the same fluent; a rule
// termination beats everything.
inline FluentSet apply_step(const FluentSet& g, const StepEffects& s) {
  FluentSet out;
  for (const auto& f : g)
    if (!s.terminated.count(f) && !s.rule_terminated.count(f)) out.insert(f);
  for (const auto& f : s.initiated)
    if (!s.rule_terminated.count(f)) out.insert(f);
  for (const auto& f : s.rule_initiated)
    if (!s.rule_terminated.count(f) && !s.terminated.count(f)) out.insert(f);
  return out;
}

inline FluentSet apply_transition(const Taxonomy& tax, const FluentSet& g, const ActInstance& act) {
  return apply_step(g, step_effects(tax, g, act));
}

inline FluentSet apply_transition(const Taxonomy& tax, const FluentSet& g, const Transition& step) {
  return apply_transition(tax, g, step.act);
}

struct DerivedBranch {
  Branch branch;
  std::vector<FluentSet> state_fluents;  // G_0 .. G_n

  const FluentSet& trace() const { return state_fluents.back(); }
  std::size_t size() const { return branch.size(); }
};

inline DerivedBranch derive(const Taxonomy& tax, const Branch& b, FluentSet g0 = {}) {
  DerivedBranch d{b, {std::move(g0)}};
  d.state_fluents.reserve(b.size() + 1);
  for (const auto& t : b.steps) d.state_fluents.push_back(apply_transition(tax, d.state_fluents.back(), t));
  return d;
}

}  // namespace protorel

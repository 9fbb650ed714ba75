#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace protorel {

// Machine-readable failure categories. The string form (see to_string) is
// what the CLI writes into its JSON diagnostics, so it is part of the
// external interface and must not change.
enum class Errc {
  // input plumbing
  io_error,
  schema_error,
  // taxonomy
  duplicate_class,
  reserved_class_name,
  unknown_class,
  unknown_parent,
  cycle_in_hierarchy,
  kind_mismatch,
  unknown_role,
  invalid_effect_pattern,
  no_asserted_class,
  ambiguous_msc,
  // protocol
  duplicate_state,
  unknown_state,
  no_final_state,
  nondeterministic_transition,
  cycle_detected,
  unreachable_state,
  dead_end_state,
  unknown_act_class,
  unknown_content_class,
  empty_actor,
  reply_content_mismatch,
  index_out_of_range,
  // derivation / comparison
  unbound_role,
  infeasible_pair,
  // cli / registry
  missing_taxonomy,
  duplicate_protocol_id,
  unknown_protocol,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::io_error: return "io-error";
    case Errc::schema_error: return "schema-error";
    case Errc::duplicate_class: return "duplicate-class";
    case Errc::reserved_class_name: return "reserved-class-name";
    case Errc::unknown_class: return "unknown-class";
    case Errc::unknown_parent: return "unknown-parent";
    case Errc::cycle_in_hierarchy: return "cycle-in-hierarchy";
    case Errc::kind_mismatch: return "kind-mismatch";
    case Errc::unknown_role: return "unknown-role";
    case Errc::invalid_effect_pattern: return "invalid-effect-pattern";
    case Errc::no_asserted_class: return "no-asserted-class";
    case Errc::ambiguous_msc: return "ambiguous-msc";
    case Errc::duplicate_state: return "duplicate-state";
    case Errc::unknown_state: return "unknown-state";
    case Errc::no_final_state: return "no-final-state";
    case Errc::nondeterministic_transition: return "nondeterministic-transition";
    case Errc::cycle_detected: return "cycle-detected";
    case Errc::unreachable_state: return "unreachable-state";
    case Errc::dead_end_state: return "dead-end-state";
    case Errc::unknown_act_class: return "unknown-act-class";
    case Errc::unknown_content_class: return "unknown-content-class";
    case Errc::empty_actor: return "empty-actor";
    case Errc::reply_content_mismatch: return "reply-content-mismatch";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::unbound_role: return "unbound-role";
    case Errc::infeasible_pair: return "infeasible-pair";
    case Errc::missing_taxonomy: return "missing-taxonomy";
    case Errc::duplicate_protocol_id: return "duplicate-protocol-id";
    case Errc::unknown_protocol: return "unknown-protocol";
  }
  return "unknown";
}

struct Diagnostic {
  Errc code;
  std::string message;
};

// Thrown by every loader and query in the library. Validation failures carry
// the full diagnostic list; other failures carry a single entry.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        diagnostics_{{code, std::move(message)}} {}

  explicit Error(std::vector<Diagnostic> diagnostics)
      : std::runtime_error(summarize(diagnostics)),
        diagnostics_(std::move(diagnostics)) {
    if (diagnostics_.empty()) diagnostics_.push_back({Errc::schema_error, "unspecified error"});
  }

  Errc code() const { return diagnostics_.front().code; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& ds) {
    if (ds.empty()) return "unspecified error";
    std::string s = std::string(to_string(ds.front().code)) + ": " + ds.front().message;
    if (ds.size() > 1) s += " (+" + std::to_string(ds.size() - 1) + " more)";
    return s;
  }

  std::vector<Diagnostic> diagnostics_;
};

}  // namespace protorel

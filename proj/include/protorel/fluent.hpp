#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "protorel/error.hpp"

namespace protorel {

// Name of a taxonomy class. Comparison is by name.
struct ClassId {
  std::string name;

  ClassId() = default;
  explicit ClassId(std::string n) : name(std::move(n)) {}

  friend bool operator==(const ClassId&, const ClassId&) = default;
  friend std::strong_ordering operator<=>(const ClassId& a, const ClassId& b) {
    return a.name.compare(b.name) <=> 0;
  }
};

inline std::ostream& operator<<(std::ostream& os, const ClassId& c) { return os << c.name; }

// An atom of interaction state. Time points are not represented; two fluents
// are the same fluent iff they are structurally equal.
//
//   Domain                 TimeInfo
//   Acceptance             accept(signatory, addressee, Object)
//   Rejection              reject(signatory, addressee, Object)
//   Commitment             C(debtor, creditor, committed)
//   ConditionalCommitment  CC(debtor, creditor, trigger, committed)
//
// The conditional form follows the CC(x, y, p, q) argument order: once the
// trigger p is brought about, x becomes committed to y for q.
class Fluent {
 public:
  enum class Kind { Domain, Acceptance, Rejection, Commitment, ConditionalCommitment };

  static Fluent domain(ClassId cls) {
    Fluent f(Kind::Domain);
    f.class_ = std::move(cls);
    return f;
  }
  static Fluent acceptance(std::string signatory, std::string addressee, ClassId object) {
    Fluent f(Kind::Acceptance);
    f.party_ = std::move(signatory);
    f.counterparty_ = std::move(addressee);
    f.class_ = std::move(object);
    return f;
  }
  static Fluent rejection(std::string signatory, std::string addressee, ClassId object) {
    Fluent f(Kind::Rejection);
    f.party_ = std::move(signatory);
    f.counterparty_ = std::move(addressee);
    f.class_ = std::move(object);
    return f;
  }
  static Fluent commitment(std::string debtor, std::string creditor, Fluent committed) {
    Fluent f(Kind::Commitment);
    f.party_ = std::move(debtor);
    f.counterparty_ = std::move(creditor);
    f.nested_.push_back(std::move(committed));
    return f;
  }
  static Fluent conditional(std::string debtor, std::string creditor, Fluent trigger,
                            Fluent committed) {
    Fluent f(Kind::ConditionalCommitment);
    f.party_ = std::move(debtor);
    f.counterparty_ = std::move(creditor);
    f.nested_.push_back(std::move(committed));
    f.nested_.push_back(std::move(trigger));
    return f;
  }

  Kind kind() const { return kind_; }
  bool is_commitment() const { return kind_ == Kind::Commitment; }
  bool is_conditional() const { return kind_ == Kind::ConditionalCommitment; }

  // Domain class, or the object class of an acceptance / rejection.
  const ClassId& cls() const { return class_; }

  // Signatory for acceptance/rejection, debtor for commitments.
  const std::string& party() const { return party_; }
  // Addressee for acceptance/rejection, creditor for commitments.
  const std::string& counterparty() const { return counterparty_; }

  const Fluent& committed() const { return nested_.at(0); }
  const Fluent& trigger() const { return nested_.at(1); }

  friend bool operator==(const Fluent& a, const Fluent& b) {
    return a.kind_ == b.kind_ && a.class_ == b.class_ && a.party_ == b.party_ &&
           a.counterparty_ == b.counterparty_ && a.nested_ == b.nested_;
  }
  friend bool operator<(const Fluent& a, const Fluent& b) { return compare(a, b) < 0; }

  std::string to_string() const {
    switch (kind_) {
      case Kind::Domain: return class_.name;
      case Kind::Acceptance:
        return "accept(" + party_ + "," + counterparty_ + "," + class_.name + ")";
      case Kind::Rejection:
        return "reject(" + party_ + "," + counterparty_ + "," + class_.name + ")";
      case Kind::Commitment:
        return "C(" + party_ + "," + counterparty_ + "," + committed().to_string() + ")";
      case Kind::ConditionalCommitment:
        return "CC(" + party_ + "," + counterparty_ + "," + trigger().to_string() + "," +
               committed().to_string() + ")";
    }
    return {};
  }

 private:
  explicit Fluent(Kind k) : kind_(k) {}

  static int compare(const Fluent& a, const Fluent& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_ ? -1 : 1;
    if (int c = a.class_.name.compare(b.class_.name)) return c;
    if (int c = a.party_.compare(b.party_)) return c;
    if (int c = a.counterparty_.compare(b.counterparty_)) return c;
    const std::size_t n = std::min(a.nested_.size(), b.nested_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare(a.nested_[i], b.nested_[i])) return c;
    if (a.nested_.size() != b.nested_.size()) return a.nested_.size() < b.nested_.size() ? -1 : 1;
    return 0;
  }

  Kind kind_;
  ClassId class_;
  std::string party_;
  std::string counterparty_;
  std::vector<Fluent> nested_;  // [committed] or [committed, trigger]
};

inline std::ostream& operator<<(std::ostream& os, const Fluent& f) { return os << f.to_string(); }

using FluentSet = std::set<Fluent>;

inline std::vector<std::string> to_strings(const FluentSet& fs) {
  std::vector<std::string> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(f.to_string());
  return out;
}

inline std::string to_string(const FluentSet& fs) {
  std::string s = "{";
  bool first = true;
  for (const auto& f : fs) {
    if (!first) s += ", ";
    s += f.to_string();
    first = false;
  }
  return s + "}";
}

namespace detail {

class FluentParser {
 public:
  explicit FluentParser(std::string_view text) : text_(text) {}

  Fluent parse_all() {
    Fluent f = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return f;
  }

 private:
  Fluent parse() {
    std::string head = name();
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '(') return Fluent::domain(ClassId(head));
    ++pos_;
    if (head == "accept" || head == "reject") {
      std::string a = name();
      expect(',');
      std::string b = name();
      expect(',');
      ClassId obj(name());
      expect(')');
      return head == "accept" ? Fluent::acceptance(a, b, obj) : Fluent::rejection(a, b, obj);
    }
    if (head == "C") {
      std::string a = name();
      expect(',');
      std::string b = name();
      expect(',');
      Fluent p = parse();
      expect(')');
      return Fluent::commitment(a, b, std::move(p));
    }
    if (head == "CC") {
      std::string a = name();
      expect(',');
      std::string b = name();
      expect(',');
      Fluent trig = parse();
      expect(',');
      Fluent q = parse();
      expect(')');
      return Fluent::conditional(a, b, std::move(trig), std::move(q));
    }
    fail("unknown fluent constructor '" + head + "'");
  }

  std::string name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }

  static bool is_delim(char c) { return c == '(' || c == ')' || c == ',' || c == ' '; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::schema_error, "cannot parse fluent '" + std::string(text_) + "' at " +
                                        std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Inverse of Fluent::to_string. Mostly used by fixtures and tests.
inline Fluent parse_fluent(std::string_view text) { return detail::FluentParser(text).parse_all(); }

inline FluentSet parse_fluents(std::initializer_list<std::string_view> texts) {
  FluentSet out;
  for (auto t : texts) out.insert(parse_fluent(t));
  return out;
}

}  // namespace protorel

#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "protorel/branching.hpp"
#include "protorel/comparison.hpp"
#include "protorel/derivation.hpp"
#include "protorel/error.hpp"
#include "protorel/protocol.hpp"
#include "protorel/registry.hpp"
#include "protorel/relations.hpp"
#include "protorel/taxonomy.hpp"

namespace protorel::cli {

enum class Format { Text, Json };

struct Options {
  std::string taxonomy;
  std::string format;
  std::string registry;
};

namespace detail {

using nlohmann::json;

inline std::vector<std::string> fluent_list(const FluentSet& fs) { return to_strings(fs); }

inline json rational_json(const Rational& r) { return {{"exact", to_string(r)}, {"value", to_double(r)}}; }

inline json valuation_json(const Valuation& v) { return json::array({v.x0, v.x1, v.x2, v.x3}); }

inline json witness_json(const BranchRelation& r) { return r.witness; }

class Session {
 public:
  Session(const Options& opts, std::ostream& out) : opts_(opts), out_(out) {}

  Format format(Format fallback) const {
    if (opts_.format.empty()) return fallback;
    return opts_.format == "json" ? Format::Json : Format::Text;
  }

  std::filesystem::path resolve(const std::string& arg) const {
    if (std::filesystem::exists(arg)) return arg;
    if (!opts_.registry.empty()) return Registry(opts_.registry).find(arg);
    throw Error(Errc::io_error, "cannot read '" + arg + "'");
  }

  // Explicit --taxonomy, else taxonomy.json beside the protocol file.
  std::optional<Taxonomy> taxonomy_for(const std::filesystem::path& protocol, bool required) const {
    std::filesystem::path path = opts_.taxonomy;
    if (path.empty()) {
      path = protocol.parent_path() / "taxonomy.json";
      if (!std::filesystem::exists(path)) {
        if (!required) return std::nullopt;
        throw Error(Errc::missing_taxonomy,
                    "no --taxonomy given and no taxonomy.json next to '" + protocol.string() + "'");
      }
    }
    return load_taxonomy_file(path);
  }

  Protocol load(const std::filesystem::path& path, const Taxonomy* tax) const {
    return load_protocol_file(path, tax);
  }

  int validate(const std::string& arg) {
    const auto path = resolve(arg);
    const auto tax = taxonomy_for(path, false);
    const Protocol p = load(path, tax ? &*tax : nullptr);
    if (format(Format::Text) == Format::Json) {
      out_ << json{{"id", p.id()},
                   {"valid", true},
                   {"states", p.states().size()},
                   {"transitions", p.transitions().size()},
                   {"finals", p.finals()},
                   {"taxonomyChecked", tax.has_value()}}
                  .dump(2)
           << '\n';
    } else {
      out_ << p.id() << ": valid (" << p.states().size() << " states, " << p.transitions().size()
           << " transitions, " << p.finals().size() << " final)" << (tax ? "" : " [structure only]") << '\n';
    }
    return 0;
  }

  int branches(const std::string& arg) {
    const auto path = resolve(arg);
    const auto tax = taxonomy_for(path, false);
    const Protocol p = load(path, tax ? &*tax : nullptr);
    const auto bs = enumerate_branches(p);
    if (format(Format::Text) == Format::Json) {
      json arr = json::array();
      for (std::size_t i = 0; i < bs.size(); ++i) {
        json acts = json::array();
        for (const auto& t : bs[i].steps) acts.push_back(to_json(t.act));
        arr.push_back({{"label", branch_label(1, i)}, {"states", bs[i].states()}, {"acts", acts}});
      }
      out_ << json{{"protocol", p.id()}, {"branches", arr}}.dump(2) << '\n';
    } else {
      for (std::size_t i = 0; i < bs.size(); ++i) out_ << branch_label(1, i) << " = " << path_string(bs[i]) << '\n';
    }
    return 0;
  }

  int trace(const std::string& arg, std::size_t index) {
    const auto path = resolve(arg);
    const auto tax = *taxonomy_for(path, true);
    const Protocol p = load(path, &tax);
    const auto bs = enumerate_branches(p);
    if (index == 0 || index > bs.size())
      throw Error(Errc::index_out_of_range,
                  "branch " + std::to_string(index) + " requested, protocol has " + std::to_string(bs.size()));
    const auto d = derive(tax, bs[index - 1]);
    const auto states = d.branch.states();
    if (format(Format::Json) == Format::Json) {
      json st = json::array();
      for (std::size_t i = 0; i < states.size(); ++i)
        st.push_back({{"index", i}, {"state", states[i]}, {"fluents", fluent_list(d.state_fluents[i])}});
      out_ << json{{"protocol", p.id()},
                   {"branch", branch_label(1, index - 1)},
                   {"path", states},
                   {"states", st},
                   {"trace", fluent_list(d.trace())}}
                  .dump(2)
           << '\n';
    } else {
      out_ << branch_label(1, index - 1) << " = " << path_string(d.branch) << '\n';
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (i > 0) out_ << "  -- " << d.branch.steps[i - 1].act.to_string() << '\n';
        out_ << "G" << i << " @" << states[i] << " = " << to_string(d.state_fluents[i]) << '\n';
      }
      out_ << "trace = " << to_string(d.trace()) << '\n';
    }
    return 0;
  }

  struct Pair {
    Taxonomy tax;
    Protocol p1, p2;
  };

  Pair load_pair(const std::string& a, const std::string& b) const {
    const auto pa = resolve(a), pb = resolve(b);
    Taxonomy tax = *taxonomy_for(pa, true);
    Protocol p1 = load(pa, &tax);
    Protocol p2 = load(pb, &tax);
    return {std::move(tax), std::move(p1), std::move(p2)};
  }

  static std::string label_line(const Protocol& l, const RelationLabel& r, const Protocol& rhs) {
    return l.id() + "[" + r.to_string() + "]" + rhs.id();
  }

  // Evidence bundle for P1 against P2. Branch labels use ordinal 1 for P1
  // and 2 for P2 in both directions.
  static json bundle(const Taxonomy& tax, const ClassificationReport& r, std::size_t lo, std::size_t ro) {
    (void)tax;
    json table = json::array();
    for (std::size_t i = 0; i < r.table.rows; ++i) {
      for (std::size_t j = 0; j < r.table.cols; ++j) {
        const auto& c = r.table.at(i, j);
        json cell = {{"left", branch_label(lo, i)}, {"right", branch_label(ro, j)}, {"feasible", c.feasible}};
        if (c.valuation) {
          cell["valuation"] = valuation_json(*c.valuation);
          cell["f"] = rational_json(c.f);
          cell["g"] = rational_json(c.g);
        }
        table.push_back(cell);
      }
    }
    json matching = nullptr;
    if (r.matching) {
      json pairs = json::array();
      for (const auto& [i, j] : r.matching->pairs) pairs.push_back({branch_label(lo, i), branch_label(ro, j)});
      matching = {{"pairs", pairs}, {"totalF", rational_json(r.matching->total)},
                  {"totalG", rational_json(r.matching->total_g)}};
    }
    json per = json::array();
    for (const auto& pr : r.per_pair) {
      json e = {{"left", branch_label(lo, pr.left)},
                {"right", branch_label(ro, pr.right)},
                {"relation", to_string(pr.relation.kind)},
                {"witness", witness_json(pr.relation)},
                {"f", rational_json(pr.f)}};
      if (pr.valuation) e["valuation"] = valuation_json(*pr.valuation);
      per.push_back(e);
    }
    json branches = json::object();
    auto list = [](const std::vector<DerivedBranch>& ds, std::size_t ord) {
      json arr = json::array();
      for (std::size_t i = 0; i < ds.size(); ++i)
        arr.push_back({{"label", branch_label(ord, i)},
                       {"states", ds[i].branch.states()},
                       {"trace", fluent_list(ds[i].trace())}});
      return arr;
    };
    branches["left"] = list(r.left, lo);
    branches["right"] = list(r.right, ro);
    json label_pairs = json::array();
    for (const auto& [i, j] : r.label_pairs) label_pairs.push_back({branch_label(lo, i), branch_label(ro, j)});
    return {{"table", table},
            {"matching", matching},
            {"perPair", per},
            {"label", r.label ? json(r.label->to_string()) : json(nullptr)},
            {"labelPath", r.path},
            {"labelPairs", label_pairs},
            {"branches", branches}};
  }

  void text_table(const ClassificationReport& r, std::size_t lo, std::size_t ro) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> head{""};
    for (std::size_t j = 0; j < r.table.cols; ++j) head.push_back(branch_label(ro, j));
    grid.push_back(head);
    for (std::size_t i = 0; i < r.table.rows; ++i) {
      std::vector<std::string> row{branch_label(lo, i)};
      for (std::size_t j = 0; j < r.table.cols; ++j) {
        const auto& c = r.table.at(i, j);
        row.push_back(c.valuation ? c.valuation->to_string() + " f=" + to_string(c.f) : "X");
      }
      grid.push_back(row);
    }
    std::vector<std::size_t> width(head.size(), 0);
    for (const auto& row : grid)
      for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
    for (const auto& row : grid) {
      std::string line;
      for (std::size_t k = 0; k < row.size(); ++k) {
        std::ostringstream cell;
        cell << std::left << std::setw(static_cast<int>(width[k])) << row[k];
        line += (k ? "  " : "") + cell.str();
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out_ << line << '\n';
    }
  }

  int compare(const std::string& a, const std::string& b) {
    const auto pr = load_pair(a, b);
    const auto r = classify_report(pr.tax, pr.p1, pr.p2);
    if (format(Format::Text) == Format::Json) {
      out_ << bundle(pr.tax, r, 1, 2).dump(2) << '\n';
      return 0;
    }
    text_table(r, 1, 2);
    if (r.matching) {
      out_ << "matching:";
      for (const auto& [i, j] : r.matching->pairs)
        out_ << " (" << branch_label(1, i) << "," << branch_label(2, j) << ")";
      out_ << "  sum f = " << to_string(r.matching->total) << "  sum g = " << to_string(r.matching->total_g)
           << '\n';
    } else {
      out_ << "matching: none\n";
    }
    return 0;
  }

  int classify(const std::string& a, const std::string& b, bool report) {
    const auto pr = load_pair(a, b);
    const auto fwd = classify_report(pr.tax, pr.p1, pr.p2);
    const auto bwd = classify_report(pr.tax, pr.p2, pr.p1);
    const bool related = fwd.label || bwd.label;
    if (report) {
      json doc = bundle(pr.tax, fwd, 1, 2);
      json rev = bundle(pr.tax, bwd, 2, 1);
      doc["reverse"] = {{"label", rev["label"]}, {"labelPath", rev["labelPath"]}, {"perPair", rev["perPair"]}};
      json lines = json::array();
      if (fwd.label) lines.push_back(label_line(pr.p1, *fwd.label, pr.p2));
      if (bwd.label) lines.push_back(label_line(pr.p2, *bwd.label, pr.p1));
      doc["relations"] = lines;
      out_ << doc.dump(2) << '\n';
      return related ? 0 : 2;
    }
    if (format(Format::Text) == Format::Json) {
      json lines = json::array();
      if (fwd.label) lines.push_back(label_line(pr.p1, *fwd.label, pr.p2));
      if (bwd.label) lines.push_back(label_line(pr.p2, *bwd.label, pr.p1));
      out_ << json{{"relations", lines}}.dump(2) << '\n';
    } else {
      if (fwd.label) out_ << label_line(pr.p1, *fwd.label, pr.p2) << '\n';
      if (bwd.label) out_ << label_line(pr.p2, *bwd.label, pr.p1) << '\n';
      if (!related) out_ << "no relation between " << pr.p1.id() << " and " << pr.p2.id() << '\n';
    }
    return related ? 0 : 2;
  }

  int registry_list() {
    const auto entries = Registry(require_registry()).list();
    if (format(Format::Text) == Format::Json) {
      json arr = json::array();
      for (const auto& e : entries) arr.push_back({{"id", e.id}, {"file", e.path.filename().string()}});
      out_ << json{{"protocols", arr}}.dump(2) << '\n';
    } else {
      for (const auto& e : entries) out_ << e.id << '\t' << e.path.filename().string() << '\n';
    }
    return 0;
  }

  int registry_add(const std::string& file) {
    const auto tax = taxonomy_for(file, true);
    const auto stored = Registry(require_registry()).add(file, &*tax);
    if (format(Format::Text) == Format::Json)
      out_ << json{{"stored", stored.filename().string()}}.dump(2) << '\n';
    else
      out_ << "stored " << stored.filename().string() << '\n';
    return 0;
  }

 private:
  const std::string& require_registry() const {
    if (opts_.registry.empty()) throw Error(Errc::io_error, "registry commands need --registry <dir>");
    return opts_.registry;
  }

  const Options& opts_;
  std::ostream& out_;
};

inline void emit_diagnostics(std::ostream& err, const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    err << json{{"code", std::string(to_string(d.code))}, {"message", d.message}}.dump() << '\n';
}

}  // namespace detail

// Entry point shared by the executable and the tests. Returns the exit code:
// 0 success, 1 validation / IO / usage error, 2 no relation found.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Commitment-based analysis and relation discovery for agent protocols", "protorel"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--taxonomy", opts.taxonomy, "Taxonomy file (default: taxonomy.json beside the protocol)");
  app.add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--registry", opts.registry, "Registry directory; protocol ids may then replace file names");

  std::string file, file2;
  std::size_t branch = 0;
  bool report = false;

  auto* validate = app.add_subcommand("validate", "Check a protocol file against every invariant");
  validate->add_option("protocol", file)->required();
  auto* branches = app.add_subcommand("branches", "List the branches of a protocol");
  branches->add_option("protocol", file)->required();
  auto* trace = app.add_subcommand("trace", "Derive the fluents along one branch");
  trace->add_option("protocol", file)->required();
  trace->add_option("--branch", branch, "1-based branch index")->required();
  auto* compare = app.add_subcommand("compare", "Feasibility and valuation table with the best matching");
  compare->add_option("p1", file)->required();
  compare->add_option("p2", file2)->required();
  auto* classify = app.add_subcommand("classify", "Relation label between two protocols");
  classify->add_option("p1", file)->required();
  classify->add_option("p2", file2)->required();
  classify->add_flag("--report", report, "Emit the full JSON evidence bundle");
  auto* registry = app.add_subcommand("registry", "Manage a directory of protocols");
  registry->require_subcommand(1);
  auto* reg_list = registry->add_subcommand("list", "List registered protocols");
  auto* reg_add = registry->add_subcommand("add", "Validate and register a protocol file");
  reg_add->add_option("protocol", file)->required();
  for (auto* sub : {validate, branches, trace, compare, classify, registry, reg_list, reg_add}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    detail::emit_diagnostics(err, {{Errc::schema_error, e.what()}});
    return 1;
  }

  detail::Session s(opts, out);
  try {
    if (*validate) return s.validate(file);
    if (*branches) return s.branches(file);
    if (*trace) return s.trace(file, branch);
    if (*compare) return s.compare(file, file2);
    if (*classify) return s.classify(file, file2, report);
    if (*reg_list) return s.registry_list();
    if (*reg_add) return s.registry_add(file);
  } catch (const Error& e) {
    detail::emit_diagnostics(err, e.diagnostics());
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    detail::emit_diagnostics(err, {{Errc::io_error, e.what()}});
    return 1;
  }
  return 1;
}

}  // namespace protorel::cli

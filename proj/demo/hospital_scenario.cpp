// Compares the public and private hospital protocols: branches, fluent
// comparison table, best matching and the resulting relation label.
#include <iostream>

#include "protorel/protorel.hpp"

using namespace protorel;

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : PROTOREL_DATA_DIR "/hospital";
  try {
    const auto tax = load_taxonomy_file(dir + "/taxonomy.json");
    const auto p1 = load_protocol_file(dir + "/p1.json", &tax);
    const auto p2 = load_protocol_file(dir + "/p2.json", &tax);
    const auto report = classify_report(tax, p1, p2);

    auto show = [](const std::vector<DerivedBranch>& ds, std::size_t ord) {
      for (std::size_t i = 0; i < ds.size(); ++i)
        std::cout << branch_label(ord, i) << " = " << path_string(ds[i].branch) << "  "
                  << to_string(ds[i].trace()) << '\n';
    };
    show(report.left, 1);
    show(report.right, 2);

    std::cout << '\n';
    for (std::size_t i = 0; i < report.table.rows; ++i) {
      for (std::size_t j = 0; j < report.table.cols; ++j) {
        const auto& c = report.table.at(i, j);
        std::cout << branch_label(1, i) << " x " << branch_label(2, j) << ": "
                  << (c.valuation ? c.valuation->to_string() + " f=" + to_string(c.f) : "X") << '\n';
      }
    }
    if (report.matching) {
      std::cout << "\nmatching";
      for (const auto& [i, j] : report.matching->pairs)
        std::cout << " (" << branch_label(1, i) << "," << branch_label(2, j) << ")";
      std::cout << '\n';
    }
    for (const auto& pr : report.per_pair)
      std::cout << branch_label(1, pr.left) << " " << to_string(pr.relation.kind) << " "
                << branch_label(2, pr.right) << '\n';
    if (report.label) std::cout << '\n' << p1.id() << "[" << report.label->to_string() << "]" << p2.id() << '\n';
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}

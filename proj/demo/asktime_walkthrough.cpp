// Derives the AskTime protocol step by step and prints the fluents that hold
// at each state.
#include <iostream>

#include "protorel/protorel.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : PROTOREL_DATA_DIR "/asktime";
  try {
    const auto tax = protorel::load_taxonomy_file(dir + "/taxonomy.json");
    const auto proto = protorel::load_protocol_file(dir + "/asktime.json", &tax);
    for (const auto& d : protorel::derive_all(tax, proto)) {
      const auto states = d.branch.states();
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (i > 0) std::cout << "   " << d.branch.steps[i - 1].act.to_string() << '\n';
        std::cout << states[i] << "  " << protorel::to_string(d.state_fluents[i]) << '\n';
      }
      std::cout << "trace " << protorel::to_string(d.trace()) << '\n';
    }
  } catch (const protorel::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}

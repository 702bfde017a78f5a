// kdd_synth: write synthetic KDD99-format records.

#include <iostream>

#include <CLI11.hpp>

#include "synthetic_kdd.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic KDD99-format record generator"};
  std::size_t count = 10000;
  std::string out;
  idps::synth::SynthOptions opts;
  app.add_option("--count", count, "number of records")->capture_default_str();
  app.add_option("--seed", opts.seed, "generator seed")->capture_default_str();
  app.add_option("--ambiguity", opts.ambiguity, "share of deliberately ambiguous records")
      ->capture_default_str();
  app.add_option("--out", out, "output file (stdout when omitted)");
  CLI11_PARSE(app, argc, argv);

  try {
    if (out.empty()) {
      for (const auto& line : idps::synth::kdd_lines(count, opts)) std::cout << line << '\n';
    } else {
      idps::synth::write_kdd_file(out, count, opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "kdd_synth: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

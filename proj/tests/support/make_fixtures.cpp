// Regenerates the committed test fixtures. Usage: sensemt_make_fixtures <tests/fixtures>
#include "fixtures.hpp"

#include "sensemt/corpus.hpp"
#include "sensemt/io.hpp"

#include <filesystem>
#include <iostream>

#include <fmt/format.h>

using namespace sensemt;
using namespace sensemt::testing;

namespace {

// Splits a trailing full stop into its own token.
AnnotatedSentence detach_period(AnnotatedSentence s) {
  auto& last = s.tokens.back();
  if (last.surface.size() > 1 && last.surface.back() == '.') {
    last.surface.pop_back();
    last.lemma.pop_back();
    last.end -= 1;
    AnnotatedToken dot;
    dot.surface = ".";
    dot.lemma = ".";
    dot.start = last.end;
    dot.end = last.end + 1;
    s.tokens.push_back(dot);
  }
  return s;
}

std::string metrics_table() {
  // system, accuracy, two surface metrics; accuracy loosely tracks spBLEU.
  return "system\taccuracy\tspBLEU\tCOMET\n"
         "sys-a\t0.412\t31.5\t0.801\n"
         "sys-b\t0.388\t29.9\t0.795\n"
         "sys-c\t0.297\t24.1\t0.772\n"
         "sys-d\t0.455\t33.0\t0.812\n"
         "sys-e\t0.251\t20.8\t0.781\n"
         "sys-f\t0.333\t27.2\t0.760\n"
         "sys-g\t0.470\t35.6\t0.820\n"
         "sys-h\t0.362\t26.0\t0.799\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: sensemt_make_fixtures <fixtures-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir / "e2e");

  io::write_atomic(dir / "c0.jsonl", serialize_corpus(c0_corpus()));

  EvalItem blaze;
  blaze.source = detach_period(annotate("blaze-1", "The horse had a blaze between its eyes.",
                                        {{"blaze", "bn:blaze.mark"}}));
  blaze.id = blaze.source.id;
  blaze.good = {"白线", "白斑"};
  blaze.bad = {"火焰", "大火"};
  blaze.src_lang = "en";
  blaze.tgt_lang = "zh";
  io::write_atomic(dir / "blaze_eval.jsonl", serialize_eval_item(blaze) + "\n");

  const auto world = make_synthetic_world(120, 20, 20240601, 3);
  io::write_atomic(dir / "e2e" / "corpus.jsonl", serialize_corpus(world.corpus));
  std::string eval;
  for (const auto& item : world.items) eval += serialize_eval_item(item) + "\n";
  io::write_atomic(dir / "e2e" / "eval.jsonl", eval);
  io::write_atomic(dir / "e2e" / "lexicon.json", world.lexicon_json);
  io::write_atomic(dir / "e2e" / "metrics.tsv", metrics_table());

  // 20 points with a moderate linear trend and deterministic noise.
  Rng rng(77);
  std::string pearson = "x\ty\n";
  for (int i = 0; i < 20; ++i) {
    const double x = static_cast<double>(uniform_below(rng, 1000000)) / 10000.0;
    const double noise = static_cast<double>(uniform_below(rng, 600000)) / 10000.0 - 30.0;
    pearson += fmt::format("{:.4f}\t{:.4f}\n", x, 0.8 * x + noise);
  }
  io::write_atomic(dir / "pearson20.tsv", pearson);
  std::cout << "fixtures written to " << dir.string() << "\n";
  return 0;
}

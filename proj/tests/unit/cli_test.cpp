#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "paralab/cli/cli.hpp"
#include "paralab/cli/run_dir.hpp"
#include "paralab/common/hash.hpp"
#include "paralab/evaluate/metrics.hpp"
#include "paralab/tensorio/corpus.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using paralab::read_file;
using paralab::write_file;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("paralab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = paralab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json error_json(const Result& r) {
  REQUIRE(!r.err.empty());
  CHECK(r.err.find('\n') == r.err.size() - 1);
  return json::parse(r.err);
}

fs::path golden_annotations(const fs::path& dir) {
  std::istringstream in(read_file(fs::path(PARALAB_TEST_DATA) / "paragen/golden.jsonl"));
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out += json::parse(line).at("sentence").dump() + "\n";
  }
  const auto path = dir / "annotations.jsonl";
  write_file(path, out);
  return path;
}

// One small trained model shared by the toy pipeline cases.
const fs::path& toy_run() {
  static TempDir dir;
  static fs::path run = [] {
    const auto r = cli({"train-toy", "--steps", "60", "--train-size", "300", "--dev-size", "40",
                        "--test-size", "20", "--out", dir.path.string()});
    REQUIRE(r.code == 0);
    return dir.path / "train-toy-0001";
  }();
  return run;
}

}  // namespace

TEST_CASE("unknown flag exits 2 with usage text and a JSON error line") {
  const auto r = cli({"correlate", "--bogus", "1"});
  CHECK(r.code == paralab::cli::kExitUsage);
  CHECK(error_json(r).at("error") == "Usage");
  CHECK(r.out.find("Usage:") != std::string::npos);
  CHECK(r.out.find("--corpus") != std::string::npos);
}

TEST_CASE("missing subcommand and missing required flag are usage errors") {
  CHECK(cli({}).code == paralab::cli::kExitUsage);
  const auto r = cli({"gen-paraphrases"});
  CHECK(r.code == paralab::cli::kExitUsage);
  CHECK(error_json(r).at("message").get<std::string>().find("--annotations") != std::string::npos);
}

TEST_CASE("runtime failures exit 1 with one machine-parseable line and leave no run dir") {
  TempDir t;
  const auto r = cli({"gen-paraphrases", "--annotations", (t.path / "missing.jsonl").string(),
                      "--out", (t.path / "runs").string()});
  CHECK(r.code == paralab::cli::kExitError);
  const auto e = error_json(r);
  CHECK(e.at("error") == "Io");
  CHECK(e.at("message").get<std::string>().find("missing.jsonl") != std::string::npos);
  CHECK(!fs::exists(t.path / "runs" / "gen-paraphrases-0001"));
}

TEST_CASE("help exits 0") {
  const auto r = cli({"erase", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--universe") != std::string::npos);
}

TEST_CASE("gen-paraphrases writes corpus, vocabulary and skip log") {
  TempDir t;
  const auto ann = golden_annotations(t.path);
  const auto r = cli({"gen-paraphrases", "--annotations", ann.string(), "--out",
                      (t.path / "runs").string()});
  REQUIRE(r.code == 0);
  const auto dir = t.path / "runs" / "gen-paraphrases-0001";
  const auto corpus = paralab::tensorio::read_corpus(dir / "pairs.jsonl");
  CHECK(corpus.size() == 3);
  CHECK(corpus.pair_kind == paralab::tensorio::PairKind::ActivePassive);
  CHECK(corpus.source[0].token_ids[0] == 4);
  CHECK(corpus.paraphrase[0].surface ==
        std::vector<std::string>{"The", "book", "was", "taken", "by", "her"});
  const auto vocab = read_file(dir / "vocab.tsv");
  CHECK(vocab.starts_with("4\tShe\n5\ttook\n"));

  std::istringstream skipped(read_file(dir / "skipped.jsonl"));
  std::vector<int> indices;
  for (std::string line; std::getline(skipped, line);) {
    const auto j = json::parse(line);
    CHECK(j.at("reason") == "UnsupportedPattern");
    indices.push_back(j.at("index").get<int>());
  }
  CHECK(indices == std::vector<int>{3, 4, 5, 6});

  const auto csv = read_file(dir / "pairs.csv");
  CHECK(csv.find("1,active,He can't take the book.,The book could not be taken by him.\n") !=
        std::string::npos);
}

TEST_CASE("clause paraphrases and the score column") {
  TempDir t;
  const auto ann = golden_annotations(t.path);
  const auto r = cli({"gen-paraphrases", "--annotations", ann.string(), "--kind", "clause-np",
                      "--score", "--out", (t.path / "runs").string()});
  REQUIRE(r.code == 0);
  const auto csv = read_file(t.path / "runs" / "gen-paraphrases-0001" / "pairs.csv");
  CHECK(csv.starts_with("index,pattern,source,paraphrase,source_logprob,paraphrase_logprob\n"));
  CHECK(csv.find("4,purpose,She sat under the sun to enjoy the warmth.,"
                 "She sat under the sun for enjoyment of the warmth.,") != std::string::npos);
}

TEST_CASE("config file keys mirror flags; explicit flags win") {
  TempDir t;
  const auto ann = golden_annotations(t.path);
  write_file(t.path / "run.json",
             json{{"annotations", "annotations.jsonl"}, {"kind", "clause-np"}, {"out", "runs"}}
                 .dump());
  auto r = cli({"gen-paraphrases", "--config", (t.path / "run.json").string()});
  REQUIRE(r.code == 0);
  CHECK(paralab::tensorio::read_corpus(t.path / "runs/gen-paraphrases-0001/pairs.jsonl").size() ==
        4);

  r = cli({"gen-paraphrases", "--config", (t.path / "run.json").string(), "--kind",
           "active-passive"});
  REQUIRE(r.code == 0);
  const auto manifest = json::parse(read_file(t.path / "runs/gen-paraphrases-0002/manifest.json"));
  CHECK(manifest.at("config").at("kind") == "active-passive");
  CHECK(manifest.at("config").at("annotations") == ann.string());

  write_file(t.path / "bad.json", json{{"annotations", "annotations.jsonl"}, {"colour", 1}}.dump());
  r = cli({"gen-paraphrases", "--config", (t.path / "bad.json").string()});
  CHECK(r.code == paralab::cli::kExitUsage);
  CHECK(error_json(r).at("message").get<std::string>().find("colour") != std::string::npos);

  write_file(t.path / "typed.json", json{{"annotations", 3}}.dump());
  CHECK(cli({"gen-paraphrases", "--config", (t.path / "typed.json").string()}).code ==
        paralab::cli::kExitUsage);
}

TEST_CASE("run directories are numbered and append-only") {
  TempDir t;
  const auto ann = golden_annotations(t.path);
  const std::vector<std::string> args = {"gen-paraphrases", "--annotations", ann.string(), "--out",
                                         (t.path / "runs").string()};
  REQUIRE(cli(args).code == 0);
  const auto first = read_file(t.path / "runs/gen-paraphrases-0001/manifest.json");
  REQUIRE(cli(args).code == 0);
  CHECK(fs::exists(t.path / "runs/gen-paraphrases-0002/pairs.jsonl"));
  CHECK(read_file(t.path / "runs/gen-paraphrases-0001/manifest.json") == first);
  CHECK(paralab::cli::create_run_dir(t.path / "runs", "gen-paraphrases").filename() ==
        "gen-paraphrases-0003");
}

TEST_CASE("manifest records config, input and output hashes") {
  TempDir t;
  const auto ann = golden_annotations(t.path);
  REQUIRE(cli({"gen-paraphrases", "--annotations", ann.string(), "--out",
               (t.path / "runs").string()})
              .code == 0);
  const auto dir = t.path / "runs/gen-paraphrases-0001";
  const auto m = json::parse(read_file(dir / "manifest.json"));
  CHECK(m.at("command") == "gen-paraphrases");
  CHECK(m.at("config").at("oracle") == "fallback");
  CHECK(m.at("inputs").at("annotations").at("hash") == paralab::git_blob_hash_file(ann));
  CHECK(m.at("inputs").at("lexicons").at("hash").contains("verb_forms.tsv"));
  CHECK(m.at("outputs").at("pairs.csv") == paralab::git_blob_hash_file(dir / "pairs.csv"));
  CHECK(!m.at("outputs").contains("manifest.json"));
}

TEST_CASE("replay reproduces CSV outputs and refuses changed inputs") {
  TempDir t;
  const auto ann = golden_annotations(t.path);
  REQUIRE(cli({"gen-paraphrases", "--annotations", ann.string(), "--score", "--out",
               (t.path / "runs").string()})
              .code == 0);
  const auto manifest = t.path / "runs/gen-paraphrases-0001/manifest.json";
  auto r = cli({"replay", "--manifest", manifest.string(), "--out", (t.path / "again").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("1 CSV outputs byte-identical") != std::string::npos);
  CHECK(read_file(t.path / "again/gen-paraphrases-0001/pairs.csv") ==
        read_file(t.path / "runs/gen-paraphrases-0001/pairs.csv"));
  const auto replayed = json::parse(read_file(t.path / "again/gen-paraphrases-0001/manifest.json"));
  CHECK(replayed.at("replay_of") == manifest.lexically_normal().string());

  write_file(ann, read_file(ann) + "\n");
  r = cli({"replay", "--manifest", manifest.string()});
  CHECK(r.code == paralab::cli::kExitError);
  CHECK(error_json(r).at("error") == "InputChanged");
}

TEST_CASE("evaluate computes BLEU from text files") {
  TempDir t;
  write_file(t.path / "cand.txt", "the book was taken by her\nhe took it\n");
  write_file(t.path / "ref.txt", "the book was taken by her\nhe took the book\n");
  const auto r = cli({"evaluate", "--candidates", (t.path / "cand.txt").string(), "--references",
                      (t.path / "ref.txt").string(), "--out", (t.path / "runs").string()});
  REQUIRE(r.code == 0);
  using paralab::evaluate::split_words;
  const std::vector<paralab::evaluate::Tokens> c = {split_words("the book was taken by her"),
                                                    split_words("he took it")};
  const std::vector<paralab::evaluate::Tokens> refs = {split_words("the book was taken by her"),
                                                       split_words("he took the book")};
  const auto m = json::parse(read_file(t.path / "runs/evaluate-0001/metrics.json"));
  CHECK(m.at("bleu").get<double>() == doctest::Approx(paralab::evaluate::bleu(c, refs)));

  write_file(t.path / "short.txt", "one line\n");
  const auto bad = cli({"evaluate", "--candidates", (t.path / "short.txt").string(),
                        "--references", (t.path / "ref.txt").string(), "--out",
                        (t.path / "runs").string()});
  CHECK(bad.code == paralab::cli::kExitError);
  CHECK(error_json(bad).at("error") == "LengthMismatch");
}

TEST_CASE("toy pipeline: dump, correlate, manipulate, erase, overlap, plot") {
  const auto run = toy_run();
  TempDir t;
  const auto out = (t.path / "runs").string();
  const auto model = (run / "model.ckpt").string();
  const auto dev = (run / "dev.jsonl").string();
  const auto test = (run / "test.jsonl").string();
  CHECK(fs::exists(run / "loss.csv"));
  CHECK(fs::exists(run / "accuracy.csv"));

  REQUIRE(cli({"dump-activations", "--model", model, "--corpus", dev, "--out", out}).code == 0);
  const auto dump = (t.path / "runs/dump-activations-0001/activations.actd").string();
  REQUIRE(cli({"correlate", "--kind", "paracorr", "--corpus", dev, "--dump", dump, "--pooling",
               "mean", "--out", out})
              .code == 0);
  const auto cdir = t.path / "runs/correlate-0001";
  CHECK(fs::exists(cdir / "map.cmap"));
  CHECK(fs::exists(cdir / "map.csv"));
  CHECK(read_file(cdir / "map.svg").starts_with("<svg"));

  // The dump route and the in-process route agree.
  REQUIRE(cli({"correlate", "--kind", "paracorr", "--corpus", dev, "--model", model, "--out", out})
              .code == 0);
  CHECK(read_file(cdir / "diag.csv") == read_file(t.path / "runs/correlate-0002/diag.csv"));
  REQUIRE(cli({"correlate", "--kind", "poscorr", "--corpus", dev, "--model", model, "--out", out})
              .code == 0);
  REQUIRE(cli({"correlate", "--kind", "tokencorr", "--corpus", dev, "--model", model, "--out",
               out})
              .code == 0);
  const auto poscorr_dump = cli({"correlate", "--kind", "poscorr", "--corpus", dev, "--dump", dump,
                                 "--out", out});
  CHECK(poscorr_dump.code == paralab::cli::kExitError);

  auto r = cli({"manipulate", "--model", model, "--dev", dev, "--test", test, "--universe",
                "all-blocks", "--select", "top-paracorr", "--k", "64", "--alpha", "1.0", "--out",
                out});
  REQUIRE(r.code == 0);
  const auto report = read_file(t.path / "runs/manipulate-0001/report.csv");
  CHECK(report.starts_with("series,metric,x,seed,value\n"));
  CHECK(report.find("top-paracorr/target-form-rate,target_form_rate,64,1,") != std::string::npos);

  REQUIRE(cli({"erase", "--model", model, "--dev", dev, "--test", test, "--k", "0,8", "--out", out})
              .code == 0);
  const auto erase = read_file(t.path / "runs/erase-0001/report.csv");
  CHECK(erase.find("top-paracorr/accuracy,accuracy,8,") != std::string::npos);
  CHECK(erase.find("bottom-paracorr/accuracy,accuracy,0,") != std::string::npos);

  REQUIRE(cli({"overlap", "--a", (cdir / "diag.csv").string(), "--b",
               (t.path / "runs/correlate-0003/diag.csv").string(), "--c",
               (t.path / "runs/correlate-0004/diag.csv").string(), "--x", "128", "--out", out})
              .code == 0);
  const auto overlap = read_file(t.path / "runs/overlap-0001/overlap.csv");
  CHECK(overlap == "x,a_vs_bc,a_vs_b,a_vs_c,b_vs_c\n128,100,100,100,100\n");

  REQUIRE(cli({"plot", "--report", (t.path / "runs/erase-0001/report.json").string(), "--out",
               out})
              .code == 0);
  CHECK(read_file(t.path / "runs/plot-0001/plot.svg").starts_with("<svg"));

  r = cli({"replay", "--manifest", (t.path / "runs/manipulate-0001/manifest.json").string()});
  REQUIRE(r.code == 0);
  CHECK(read_file(t.path / "runs/manipulate-0002/report.csv") == report);
}

// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "backend_spec.hpp"
#include "emovec/emovec.hpp"

namespace emovec::cli {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string dict = "default";
  std::string backend;
  std::string policy = "space";
  std::string tail{kDefaultTailPhrase};
  bool renormalized = false;
  TransportFlags transport;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
  cmd.add_option("--dict", f.dict, "Dictionary file, or 'default' for the bundled list")
      ->capture_default_str();
  cmd.add_option("--backend", f.backend,
                 "toy:seed=N[,vocab=V,ctx=M,scale=S] or remote:url=URL[,model=ID]")
      ->required();
  cmd.add_option("--policy", f.policy, "Surface variants to score: space,bare,cap")
      ->capture_default_str();
  cmd.add_option("--tail", f.tail, "Tail phrase appended after the text")->capture_default_str();
  cmd.add_flag("--renormalized", f.renormalized,
               "Also emit raw probabilities renormalized over the dictionary");
  cmd.add_option_function<long>(
      "--timeout-ms", [&f](long v) { f.transport.timeout_ms = v; },
      "Remote request timeout in milliseconds");
  cmd.add_option_function<unsigned>(
      "--retries", [&f](unsigned v) { f.transport.retries = v; },
      "Remote retry count for transport failures");
}

EmotionDictionary load_dict(const std::string& spec) {
  return spec == "default" ? bundled_dictionary() : load_dictionary(spec);
}

EstimatorConfig make_config(const CommonFlags& f) {
  EstimatorConfig config;
  config.prompt = TailPrompt::with_tail(f.tail);
  config.policy = VariantPolicy::parse(f.policy);
  config.renormalize = f.renormalized;
  return config;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_top(std::ostream& out, const std::vector<RankedEmotion>& ranked) {
  for (const auto& r : ranked) {
    out << r.word << '\t' << format_value(r.value) << '\n';
  }
}

std::string file_stem_for(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
  return out;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// ---------------------------------------------------------------- score

struct ScoreFlags {
  CommonFlags common;
  std::string text;
  std::string out;
  std::string plot;
  std::optional<std::size_t> top;
};

int cmd_score(const ScoreFlags& f, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto dict = load_dict(f.common.dict);
  std::string text;
  if (f.text == "-") {
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  } else {
    text = read_file(f.text);
  }
  auto config = make_config(f.common);
  if (f.top && (*f.top < 1 || *f.top > dict.size())) {
    throw ValidationError("--top must be in [1, " + std::to_string(dict.size()) + "]");
  }

  const auto backend = make_backend(f.common.backend, f.common.transport);
  CountingBackend counted(*backend);
  const Estimator estimator(dict, counted, std::move(config));
  const EmotionVector vec = estimator.score(text);
  if (vec.truncated) {
    err << "warning: text truncated to fit the backend context window\n";
  }

  if (!f.out.empty()) {
    ensure_parent(f.out);
    write_file_atomic(f.out, to_json(vec));
  }
  if (!f.plot.empty()) {
    ensure_parent(f.plot);
    write_file_atomic(f.plot, plot::bar_chart_svg(vec.scaled, dict.words(),
                                                  "Scaled emotion dictionary probabilities"));
  }
  if (f.top) {
    print_top(out, top_k(vec, dict, *f.top));
  } else if (f.out.empty()) {
    out << to_json(vec);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- corpus

struct CorpusFlags {
  CommonFlags common;
  std::string in;
  std::string cache;
  std::string out;
  std::string overlay;
  std::optional<std::size_t> top;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
};

int cmd_corpus(const CorpusFlags& f, std::ostream& out, std::ostream& err) {
  const auto dict = load_dict(f.common.dict);
  auto config = make_config(f.common);
  if (f.top && (*f.top < 1 || *f.top > dict.size())) {
    throw ValidationError("--top must be in [1, " + std::to_string(dict.size()) + "]");
  }
  const IngestResult corpus = ingest(fs::path(f.in));

  std::string cache_dir = f.cache;
  if (cache_dir.empty()) {
    if (const char* env = std::getenv("EMOVEC_CACHE"); env && *env) cache_dir = env;
  }
  std::optional<VectorCache> cache;
  if (!cache_dir.empty()) cache.emplace(cache_dir);

  const auto backend = make_backend(f.common.backend, f.common.transport);
  CountingBackend counted(*backend);
  const Estimator estimator(dict, counted, std::move(config));
  const CorpusScore scored =
      score_corpus(corpus.records, estimator, cache ? &*cache : nullptr, f.workers);

  fs::create_directories(f.out);
  std::set<std::string> used;
  std::vector<EmotionVector> ok;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    if (!scored.vectors[i]) continue;
    std::string stem = file_stem_for(corpus.records[i].id);
    for (int n = 2; !used.insert(stem).second; ++n) {
      stem = file_stem_for(corpus.records[i].id) + "-" + std::to_string(n);
    }
    write_file_atomic(fs::path(f.out) / (stem + ".json"), to_json(*scored.vectors[i]));
    ok.push_back(*scored.vectors[i]);
  }

  std::vector<ManifestEntry> manifest = corpus.issues;
  manifest.insert(manifest.end(), scored.failures.begin(), scored.failures.end());
  std::sort(manifest.begin(), manifest.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.line < b.line; });
  const fs::path manifest_path = fs::path(f.out) / "failures.json";
  write_file_atomic(manifest_path, manifest_json(manifest));

  err << "scored " << ok.size() << " of " << corpus.records.size() << " records ("
      << scored.cache_hits << " from cache); backend calls: " << counted.calls() << '\n';
  if (!manifest.empty()) {
    err << "warning: " << manifest.size() << " record(s) failed; see " << manifest_path.string()
        << '\n';
  }
  if (ok.empty()) {
    err << "error: every record failed to score\n";
    return kExitBackend;
  }

  const Superposition sup = superpose(ok);
  if (!f.overlay.empty()) {
    ensure_parent(f.overlay);
    write_file_atomic(f.overlay,
                      plot::overlay_svg(sup.overlay, sup.mean, dict.words(),
                                        "Superposition of emotion descriptor probabilities"));
  }
  if (f.top) {
    EmotionVector mean_vec;
    mean_vec.scaled = sup.mean;
    print_top(out, top_k(mean_vec, dict, *f.top));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- pca

struct PcaFlags {
  std::string vectors;
  std::string dict;
  bool centered = false;
  bool use_raw = false;
  std::string out_matrix;
  std::string out_spectrum;
  std::string heatmap;
  std::string scree;
  double mass = 0.95;
};

int cmd_pca(const PcaFlags& f, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(f.vectors)) {
    throw ValidationError("vectors directory not found: " + f.vectors);
  }
  if (!(f.mass > 0.0 && f.mass <= 1.0)) {
    throw ValidationError("--mass must be in (0, 1]");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(f.vectors)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json" &&
        entry.path().filename() != "failures.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ValidationError("no vector files in " + f.vectors);
  }

  std::vector<EmotionVector> vectors;
  vectors.reserve(files.size());
  for (const auto& p : files) {
    try {
      vectors.push_back(emotion_vector_from_json(read_file(p)));
    } catch (const ValidationError& e) {
      throw ValidationError(p.string() + ": " + e.what());
    }
  }
  std::vector<std::string> mismatched;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].dictionary_digest != vectors.front().dictionary_digest ||
        vectors[i].size() != vectors.front().size()) {
      mismatched.push_back(files[i].string());
    }
  }
  if (!mismatched.empty()) {
    std::string msg = "vectors from a different dictionary than " + files.front().string() + ":";
    for (const auto& m : mismatched) msg += "\n  " + m;
    throw ValidationError(msg);
  }

  std::vector<std::string> labels;
  if (!f.dict.empty()) {
    const auto dict = load_dict(f.dict);
    if (dict.digest() != vectors.front().dictionary_digest) {
      throw ValidationError("dictionary " + f.dict + " does not match the vectors' digest");
    }
    labels = dict.words();
  } else {
    for (std::size_t i = 0; i < vectors.front().size(); ++i) labels.push_back("e" + std::to_string(i));
  }

  const auto cooc = cooccurrence(vectors, f.centered,
                                 f.use_raw ? VectorSource::kRaw : VectorSource::kScaled);
  const auto eig = eigensystem(cooc);
  const auto spectrum = reported_spectrum(eig);

  ensure_parent(f.out_matrix);
  write_file_atomic(f.out_matrix, matrix_csv(cooc.m, labels));
  ensure_parent(f.out_spectrum);
  write_file_atomic(f.out_spectrum, spectrum_csv(spectrum));
  if (!f.heatmap.empty()) {
    ensure_parent(f.heatmap);
    write_file_atomic(f.heatmap, plot::heatmap_svg(cooc.m, labels, "Co-occurrence matrix"));
  }
  if (!f.scree.empty()) {
    ensure_parent(f.scree);
    write_file_atomic(f.scree, plot::scree_svg(spectrum, "Sorted eigenvalues"));
  }

  err << "vectors: " << vectors.size() << ", dimension: " << cooc.m.size()
      << ", jacobi sweeps: " << eig.sweeps << '\n';
  out << "effective_dimension(" << format_shortest(f.mass)
      << ") = " << effective_dimension(spectrum, f.mass) << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"emovec: emotion probability vectors from next-token distributions", "emovec"};
  app.require_subcommand(1);

  ScoreFlags score;
  auto* score_cmd = app.add_subcommand("score", "Score one text against the emotion dictionary");
  score_cmd->add_option("--text", score.text, "Text file, or '-' for standard input")->required();
  add_common(*score_cmd, score.common);
  score_cmd->add_option("--out", score.out, "Write the emotion vector JSON here");
  score_cmd->add_option("--plot", score.plot, "Write a bar chart SVG of scaled values");
  score_cmd->add_option("--top", score.top, "Print the K most probable emotions");

  CorpusFlags corpus;
  auto* corpus_cmd = app.add_subcommand("corpus", "Score every review in a JSONL corpus");
  corpus_cmd->add_option("--in", corpus.in, "Corpus JSONL file")->required();
  add_common(*corpus_cmd, corpus.common);
  corpus_cmd->add_option("--cache", corpus.cache, "Vector cache directory (default: $EMOVEC_CACHE)");
  corpus_cmd->add_option("--out", corpus.out, "Output directory for vectors and failures.json")
      ->required();
  corpus_cmd->add_option("--overlay", corpus.overlay, "Write an overlay SVG of all vectors and their mean");
  corpus_cmd->add_option("--top", corpus.top, "Print the K most probable emotions of the mean");
  corpus_cmd->add_option("--workers", corpus.workers, "Parallel scoring workers")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  PcaFlags pca;
  auto* pca_cmd = app.add_subcommand("pca", "Co-occurrence matrix and eigen spectrum of vectors");
  pca_cmd->add_option("--vectors", pca.vectors, "Directory of emotion vector JSON files")->required();
  pca_cmd->add_option("--dict", pca.dict, "Dictionary for matrix labels (must match the vectors)");
  pca_cmd->add_flag("--centered", pca.centered, "Subtract the mean vector first (covariance)");
  pca_cmd->add_flag("--use-raw", pca.use_raw, "Use raw instead of max-scaled vectors");
  pca_cmd->add_option("--out-matrix", pca.out_matrix, "Matrix CSV output")->required();
  pca_cmd->add_option("--out-spectrum", pca.out_spectrum, "Sorted spectrum CSV output")->required();
  pca_cmd->add_option("--heatmap", pca.heatmap, "Write a heatmap SVG of the matrix");
  pca_cmd->add_option("--scree", pca.scree, "Write a scree plot SVG of the spectrum");
  pca_cmd->add_option("--mass", pca.mass, "Spectral mass for effective_dimension")
      ->capture_default_str();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("emovec");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help is raised as CallForHelp from the subcommand.
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (score_cmd->parsed()) return cmd_score(score, in, out, err);
    if (corpus_cmd->parsed()) return cmd_corpus(corpus, out, err);
    if (pca_cmd->parsed()) return cmd_pca(pca, out, err);
  } catch (const BackendError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBackend;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace emovec::cli

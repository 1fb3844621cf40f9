// graphfx command-line tool.
//
// Exit codes: 0 success, 1 invalid input graph, 2 I/O, parse or other error.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "graphfx/canonicalize.hpp"
#include "graphfx/errors.hpp"
#include "graphfx/graph_io.hpp"
#include "graphfx/metrics.hpp"
#include "graphfx/renderer.hpp"
#include "graphfx/stems.hpp"
#include "graphfx/synthgen.hpp"
#include "graphfx/tokenizer.hpp"
#include "graphfx/validate.hpp"
#include "graphfx/wav.hpp"

namespace fs = std::filesystem;
using namespace graphfx;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitError = 2;

// Writes through a sibling temp file and renames it into place.
void write_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot open '" + tmp.string() + "' for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

void write_output(const std::string& path, std::string_view text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_atomic(path, text);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

AudioBuffer fit_length(const AudioBuffer& in, std::size_t length) {
  if (in.length() == length) return in;
  AudioBuffer out(length);
  for (std::size_t c = 0; c < kChannels; ++c)
    for (std::size_t n = 0; n < std::min(length, in.length()); ++n) out.at(c, n) = in.at(c, n);
  return out;
}

// Stems named after source types (<dir>/<name>.wav), cropped or zero-padded
// to `length`. Missing files are skipped.
std::map<std::string, AudioBuffer> load_stem_dir(const std::string& dir, Task task,
                                                 std::size_t length) {
  std::map<std::string, AudioBuffer> out;
  for (TypeId t : Registry::instance().source_types(task)) {
    const auto& name = spec_of(t).name;
    const fs::path p = fs::path(dir) / (name + ".wav");
    if (fs::exists(p)) out.emplace(name, fit_length(read_wav(p.string()), length));
  }
  if (out.empty()) throw Error("no " + std::string(task_name(task)) + " stems found in '" + dir + "'");
  return out;
}

unsigned default_threads() {
  if (const char* env = std::getenv("GRAPHFX_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::string index_name(std::uint64_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(i));
  return buf;
}

Task parse_task_or_throw(const std::string& s) {
  auto t = parse_task(s);
  if (!t) throw Error("unknown task '" + s + "' (expected singing or drum)");
  return *t;
}

// Graph JSON, or a token JSONL holding one sequence.
struct LoadedPrediction {
  std::optional<Graph> graph;
  std::optional<TokenSequence> tokens;
};

LoadedPrediction load_prediction(const std::string& path) {
  LoadedPrediction p;
  if (fs::path(path).extension() == ".jsonl") {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path + "'");
    auto seqs = read_tokens(is);
    if (seqs.size() != 1) throw ParseError("'" + path + "' must hold exactly one token sequence");
    p.tokens = seqs.front();
    auto decoded = from_tokens(*p.tokens);
    if (decoded.ok()) p.graph = std::move(decoded.graph);
  } else {
    p.graph = load_graph_file(path);
  }
  return p;
}

int cmd_validate(const std::string& path) {
  const Graph g = load_graph_file(path);
  const auto report = validate(g);
  if (report.valid()) {
    std::cout << "valid\n";
    return 0;
  }
  for (const auto& v : report.violations)
    std::cout << code_name(v.code) << ": " << v.detail << "\n";
  return kExitInvalid;
}

int cmd_render(const std::string& graph_path, const std::vector<std::string>& source_args,
               const std::string& out, std::size_t length) {
  const Graph g = load_graph_file(graph_path);
  require_valid(g);
  std::map<std::string, AudioBuffer> stems;
  SourceMap by_id;
  for (const auto& arg : source_args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw Error("--source expects key=path, got '" + arg + "'");
    const std::string key = arg.substr(0, eq);
    AudioBuffer buf = read_wav(arg.substr(eq + 1));
    if (!key.empty() && std::all_of(key.begin(), key.end(), ::isdigit))
      by_id.emplace(std::stoi(key), std::move(buf));
    else
      stems.emplace(key, std::move(buf));
  }
  if (length == 0) {
    for (const auto& [k, b] : stems) length = std::max(length, b.length());
    for (const auto& [k, b] : by_id) length = std::max(length, b.length());
    if (length == 0) length = kDefaultSegmentLength;
  }
  for (auto& [k, b] : stems) b = fit_length(b, length);
  SourceMap sources = bind_sources(g, stems, length);
  for (auto& [id, b] : by_id) sources[id] = fit_length(b, length);
  const AudioBuffer y = render(RenderRequest{g, std::move(sources), length});
  write_atomic(out, encode_wav(y));
  return 0;
}

struct GenerateArgs {
  std::string task = "singing";
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  std::uint64_t start = 0;
  std::string sources;
  std::string out;
  unsigned threads = 1;
  std::size_t length = kDefaultSegmentLength;
  std::string motif;
};

int cmd_generate(const GenerateArgs& a) {
  GenConfig cfg;
  cfg.task = parse_task_or_throw(a.task);
  cfg.seed = a.seed;
  cfg.length = a.length;
  if (!a.motif.empty()) {
    cfg.forced_motif = parse_motif(a.motif);
    if (!cfg.forced_motif) throw Error("unknown motif '" + a.motif + "'");
  }
  cfg.check();

  std::optional<std::map<std::string, AudioBuffer>> shared_stems;
  if (!a.sources.empty()) shared_stems = load_stem_dir(a.sources, cfg.task, cfg.length);

  const fs::path root(a.out);
  for (const char* sub : {"graphs", "audio", "tokens", "sources"})
    fs::create_directories(root / sub);

  std::vector<ManifestRow> rows(a.count);
  std::vector<std::string> errors(a.count);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= a.count) return;
      const std::uint64_t index = a.start + k;
      try {
        const auto pair = generate_pair(cfg, index, shared_stems ? &*shared_stems : nullptr);
        const std::string name = index_name(index);
        ManifestRow row;
        row.id = index;
        row.seed = cfg.seed;
        row.task = cfg.task;
        row.graph = "graphs/" + name + ".json";
        row.audio = "audio/" + name + ".wav";
        write_atomic(root / row.graph, save_graph(pair.graph));
        write_atomic(root / row.audio, encode_wav(pair.audio));
        std::ostringstream tokens;
        write_tokens(tokens, to_tokens(pair.graph));
        write_atomic(root / "tokens" / (name + ".jsonl"), tokens.str());
        if (shared_stems) {
          for (const auto& [stem, buf] : pair.stems)
            row.sources.push_back((fs::path(a.sources) / (stem + ".wav")).string());
        } else {
          fs::create_directories(root / "sources" / name);
          for (const auto& [stem, buf] : pair.stems) {
            const std::string rel = "sources/" + name + "/" + stem + ".wav";
            write_atomic(root / rel, encode_wav(buf));
            row.sources.push_back(rel);
          }
        }
        rows[k] = std::move(row);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(a.threads, static_cast<unsigned>(a.count)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::uint64_t k = 0; k < a.count; ++k)
    if (!errors[k].empty())
      throw Error("pair " + std::to_string(a.start + k) + ": " + errors[k]);
  std::string manifest;
  for (const auto& row : rows) manifest += manifest_line(row) + "\n";
  write_atomic(root / "manifest.jsonl", manifest);
  std::cout << "wrote " << a.count << " pairs to " << root.string() << "\n";
  return 0;
}

int cmd_metrics(const std::string& pred_path, const std::string& gt_path,
                const std::string& oracle_path, const std::string& sources, std::size_t length,
                std::uint64_t stems_seed, const std::string& out) {
  const Graph gt = load_graph_file(gt_path);
  require_valid(gt);
  const auto pred = load_prediction(pred_path);
  std::optional<Graph> oracle;
  if (!oracle_path.empty())
    oracle = load_graph_file(oracle_path);
  else if (pred.graph && same_structure(*pred.graph, gt))
    oracle = pred.graph;

  EvalRequest req;
  req.gt = &gt;
  req.pred_full = pred.graph ? &*pred.graph : nullptr;
  req.pred_oracle = oracle ? &*oracle : nullptr;
  req.pred_tokens = pred.tokens ? &*pred.tokens : nullptr;
  req.length = length;
  req.stems = sources.empty() ? make_stems(gt.task, stems_seed, length, false)
                              : load_stem_dir(sources, gt.task, length);
  write_output(out, report_to_json(evaluate(req)));
  return 0;
}

int cmd_stems(const std::string& task, std::uint64_t seed, const std::string& out,
              std::size_t length) {
  fs::create_directories(out);
  for (const auto& [name, buf] : make_stems(parse_task_or_throw(task), seed, length, false))
    write_atomic(fs::path(out) / (name + ".wav"), encode_wav(buf));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audio processing graph engine: render, generate, canonicalize, tokenize, score"};
  app.require_subcommand(1);

  std::string graph_path, out_path, pred_path, gt_path, oracle_path, sources_dir;
  std::vector<std::string> source_args;
  std::size_t length = kDefaultSegmentLength;
  std::size_t render_length = 0;
  std::uint64_t stems_seed = 0;
  bool structural = false;
  GenerateArgs gen;
  gen.threads = default_threads();

  auto* render_cmd = app.add_subcommand("render", "Render a graph to WAV");
  render_cmd->add_option("--graph", graph_path, "Graph JSON")->required();
  render_cmd->add_option("--source", source_args,
                         "Dry signal as key=path; key is a source type name or node id");
  render_cmd->add_option("--out", out_path, "Output WAV")->required();
  render_cmd->add_option("--length", render_length,
                         "Samples to render (default: longest source)");

  auto* gen_cmd = app.add_subcommand("generate", "Generate graph/audio pairs and a manifest");
  gen_cmd->add_option("--task", gen.task, "singing or drum")->capture_default_str();
  gen_cmd->add_option("--count", gen.count, "Number of pairs")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Run seed")->capture_default_str();
  gen_cmd->add_option("--start", gen.start, "First pair index")->capture_default_str();
  gen_cmd->add_option("--sources", gen.sources,
                      "Directory of dry stems named <source>.wav (default: procedural stems)");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--threads", gen.threads, "Worker threads (env GRAPHFX_THREADS)")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--length", gen.length, "Segment length in samples")
      ->capture_default_str();
  gen_cmd->add_option("--motif", gen.motif, "Use only this motif");

  auto* val_cmd = app.add_subcommand("validate", "Check a graph's structure");
  val_cmd->add_option("graph", graph_path, "Graph JSON")->required();

  auto* canon_cmd = app.add_subcommand("canonicalize", "Reorder serial LTI units");
  canon_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  canon_cmd->add_option("-o,--out", out_path, "Output graph JSON (default stdout)");
  canon_cmd->add_flag("--structural", structural,
                      "Also treat crossover/filter/mix blocks as units");

  auto* tok_cmd = app.add_subcommand("tokenize", "Write a graph's token sequence as JSONL");
  tok_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  tok_cmd->add_option("-o,--out", out_path, "Output JSONL (default stdout)");

  auto* detok_cmd = app.add_subcommand("detokenize", "Rebuild a prototype graph from tokens");
  detok_cmd->add_option("tokens", graph_path, "Token JSONL with one sequence")->required();
  detok_cmd->add_option("-o,--out", out_path, "Output graph JSON (default stdout)");

  auto* met_cmd = app.add_subcommand("metrics", "Score a prediction against a ground truth");
  met_cmd->add_option("--pred", pred_path, "Predicted graph JSON or token JSONL")->required();
  met_cmd->add_option("--gt", gt_path, "Ground-truth graph JSON")->required();
  met_cmd->add_option("--oracle", oracle_path,
                      "Ground-truth structure with predicted params (default: --pred when "
                      "structures match)");
  met_cmd->add_option("--sources", sources_dir,
                      "Directory of dry stems named <source>.wav (default: procedural)");
  met_cmd->add_option("--stems-seed", stems_seed, "Seed of procedural stems");
  met_cmd->add_option("--length", length, "Segment length in samples")->capture_default_str();
  met_cmd->add_option("-o,--out", out_path, "Report JSON (default stdout)");

  auto* dot_cmd = app.add_subcommand("export-dot", "Write Graphviz DOT");
  dot_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  dot_cmd->add_option("-o,--out", out_path, "Output file (default stdout)");

  std::string stems_task = "singing";
  auto* stems_cmd = app.add_subcommand("stems", "Write procedural dry stems");
  stems_cmd->add_option("--task", stems_task, "singing or drum")->capture_default_str();
  stems_cmd->add_option("--seed", stems_seed, "Seed")->capture_default_str();
  stems_cmd->add_option("--out", out_path, "Output directory")->required();
  stems_cmd->add_option("--length", length, "Samples")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*render_cmd) return cmd_render(graph_path, source_args, out_path, render_length);
    if (*gen_cmd) return cmd_generate(gen);
    if (*val_cmd) return cmd_validate(graph_path);
    if (*canon_cmd) {
      const Graph g = load_graph_file(graph_path);
      write_output(out_path,
                   save_graph(lti_reorder(g, structural ? LtiPolicy::structural
                                                        : LtiPolicy::exact)));
      return 0;
    }
    if (*tok_cmd) {
      std::ostringstream ss;
      write_tokens(ss, to_tokens(load_graph_file(graph_path)));
      write_output(out_path, ss.str());
      return 0;
    }
    if (*detok_cmd) {
      std::istringstream is(read_file(graph_path));
      const auto seqs = read_tokens(is);
      if (seqs.size() != 1) throw ParseError("expected exactly one token sequence");
      const auto decoded = from_tokens(seqs.front());
      if (!decoded.ok()) {
        std::cout << diagnosis_name(decoded.diagnosis) << ": " << decoded.detail << "\n";
        return kExitInvalid;
      }
      write_output(out_path, save_graph(*decoded.graph));
      return 0;
    }
    if (*met_cmd)
      return cmd_metrics(pred_path, gt_path, oracle_path, sources_dir, length, stems_seed,
                         out_path);
    if (*dot_cmd) {
      write_output(out_path, export_dot(load_graph_file(graph_path)));
      return 0;
    }
    if (*stems_cmd) return cmd_stems(stems_task, stems_seed, out_path, length);
  } catch (const InvalidGraphError& e) {
    std::cerr << "invalid graph: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

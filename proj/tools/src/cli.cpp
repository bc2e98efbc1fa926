#include "maxstrat/cli.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "maxstrat/errors.hpp"
#include "maxstrat/families.hpp"
#include "maxstrat/oracle.hpp"
#include "maxstrat/parser.hpp"

namespace maxstrat::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct AnalyzeOptions {
  std::string file;
  std::vector<std::string> template_args;
  std::string variant = "g";
  std::optional<std::size_t> freeze;
  std::string backend = "internal";
  bool oracle = false;
  bool stats = false;
  std::string out = "text";
};

Template choose_template(const AnalyzeOptions& opts, const ModelFile& model) {
  if (opts.template_args.empty()) {
    return model.template_spec ? model.template_spec->build(model.system) : Template::box(model.system);
  }
  auto kind = TemplateSpec::parse_kind(opts.template_args[0]);
  if (kind == TemplateSpec::Kind::Rows) {
    if (opts.template_args.size() != 2) throw UsageError("--template rows expects a file");
    return parse_template(read_file(opts.template_args[1]), model.system).build(model.system);
  }
  if (opts.template_args.size() != 1) throw UsageError("--template " + opts.template_args[0] + " takes no file");
  TemplateSpec spec;
  spec.kind = kind;
  return spec.build(model.system);
}

int analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  ModelFile model;
  try {
    model = parse_model(read_file(opts.file));
  } catch (const ParseError& e) {
    err << opts.file << ":" << e.what() << "\n";
    return kError;
  }
  Template tmpl = choose_template(opts, model);
  EngineConfig config;
  config.variant = parse_variant(opts.variant);
  config.freeze_class_budget = opts.freeze;
  config.backend = SmtBackend::parse(opts.backend);
  bool machine = opts.out == "machine";

  Engine engine(model.system, tmpl, config);
  engine.run();
  out << (machine ? format_machine(engine.space(), tmpl, engine.value())
                  : format_text(engine.space(), tmpl, engine.value()));
  if (opts.stats) {
    out << (machine ? "stats\n" : "stats:\n") << engine.stats().str();
    if (!machine) {
      char wall[32];
      std::snprintf(wall, sizeof wall, "%.3f", engine.stats().wall_ms);
      out << "wall_ms = " << wall << "\n";
    }
  }
  if (opts.oracle) {
    BoundTable expected = oracle::iterate_explicit(model.system, tmpl);
    std::string diff = oracle::diff(model.system, tmpl, expected, tabulate(engine.space(), engine.value()));
    if (!diff.empty()) {
      out << "oracle: mismatch\n";
      err << diff;
      return kOracleMismatch;
    }
    out << "oracle: agree\n";
  }
  return kOk;
}

struct BenchOptions {
  std::string family;
  std::string sizes = "1..4";
  std::string variants = "ntsgm";
  std::optional<std::size_t> freeze;
  std::string backend = "internal";
  std::size_t jobs = 1;
};

std::pair<std::size_t, std::size_t> parse_sizes(const std::string& text) {
  auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      std::size_t s = std::stoul(text);
      return {s, s};
    }
    return {std::stoul(text.substr(0, dots)), std::stoul(text.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw UsageError("bad size range '" + text + "' (expected N or LO..HI)");
  }
}

int bench(const BenchOptions& opts, std::ostream& out) {
  auto [lo, hi] = parse_sizes(opts.sizes);
  if (lo == 0 || lo > hi) throw UsageError("bad size range '" + opts.sizes + "'");
  std::string variants;
  for (char c : opts.variants) {
    if (c == ',') continue;
    parse_variant(std::string(1, c));
    variants += c;
  }
  EngineConfig base;
  base.freeze_class_budget = opts.freeze;
  base.backend = SmtBackend::parse(opts.backend);
  auto rows = run_bench(opts.family, lo, hi, variants, base, opts.jobs);
  out << kBenchHeader << "\n";
  for (const auto& row : rows) out << csv_line(row) << "\n";
  return kOk;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_line(const BenchRow& row) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", row.stats.wall_ms);
  std::ostringstream line;
  line << row.family << "," << row.size << "," << row.variant << "," << row.bools << ","
       << row.choices << "," << row.rows << "," << wall << "," << row.stats.smt_checks << ","
       << row.stats.sat_enumerations << "," << row.stats.lp_unknowns << ","
       << row.stats.iterations << "," << row.invariant_hash;
  return line.str();
}

std::vector<BenchRow> run_bench(const std::string& family, std::size_t size_lo,
                                std::size_t size_hi, const std::string& variants,
                                const EngineConfig& base, std::size_t jobs) {
  std::vector<BenchRow> rows;
  for (std::size_t s = size_lo; s <= size_hi; ++s) {
    make_family(family, s);
    for (char v : variants) {
      BenchRow row;
      row.family = family;
      row.size = s;
      row.variant = v;
      rows.push_back(row);
    }
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(rows.size());
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      BenchRow& row = rows[k];
      try {
        TransitionSystem ts = make_family(row.family, row.size);
        Template tmpl = Template::box(ts);
        EngineConfig config = base;
        config.variant = parse_variant(std::string(1, row.variant));
        Engine engine(ts, tmpl, config);
        engine.run();
        row.bools = ts.bools().size();
        row.choices = ts.choices().size();
        row.rows = tmpl.size();
        row.stats = engine.stats();
        row.invariant_hash = fnv1a_hex(format_machine(engine.space(), tmpl, engine.value()));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::size_t workers = std::max<std::size_t>(1, std::min(jobs, rows.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Least inductive invariants by max-strategy iteration", "maxstrat"};
  app.require_subcommand(1);

  AnalyzeOptions analyze_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute the invariant of a model file");
  analyze_cmd->add_option("file", analyze_opts.file, "Model file")->required();
  analyze_cmd->add_option("--template", analyze_opts.template_args, "box | octagon | rows <file>")
      ->expected(1, 2);
  analyze_cmd->add_option("--variant", analyze_opts.variant, "Improvement variant")
      ->check(CLI::IsMember({"n", "t", "s", "g", "m"}));
  analyze_cmd->add_option("--freeze", analyze_opts.freeze, "Freeze rows above this many classes")
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--smt-backend", analyze_opts.backend, "internal | external:<path>");
  analyze_cmd->add_flag("--oracle", analyze_opts.oracle, "Compare with explicit-state iteration");
  analyze_cmd->add_flag("--stats", analyze_opts.stats, "Print statistics");
  analyze_cmd->add_option("--out", analyze_opts.out, "Output format")
      ->check(CLI::IsMember({"text", "machine"}));

  BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Run a generated family and print CSV");
  bench_cmd->add_option("family", bench_opts.family, "array1d | array2d | array3d")->required();
  bench_cmd->add_option("--sizes", bench_opts.sizes, "N or LO..HI");
  bench_cmd->add_option("--variants", bench_opts.variants, "Variant letters, e.g. ng or n,g");
  bench_cmd->add_option("--freeze", bench_opts.freeze, "Freeze rows above this many classes")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--smt-backend", bench_opts.backend, "internal | external:<path>");
  bench_cmd->add_option("--jobs", bench_opts.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }
  try {
    if (analyze_cmd->parsed()) return analyze(analyze_opts, out, err);
    return bench(bench_opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace maxstrat::cli

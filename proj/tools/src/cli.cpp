#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "srcpool/eval.hpp"
#include "srcpool/generators.hpp"
#include "srcpool/graph_io.hpp"
#include "srcpool/operators/topk.hpp"
#include "srcpool/registry.hpp"
#include "srcpool/report.hpp"
#include "srcpool/training.hpp"

namespace srcpool::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRunspecPrefix = "# runspec: srcpool";

// ------------------------------------------------------------ helpers

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::string> split_all(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items)
    for (auto& part : split(item, ',')) out.push_back(std::move(part));
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

template <typename T>
T parse_number(const std::string& what, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw std::invalid_argument("bad " + what + ": '" + text + "'");
  return value;
}

std::string quote(const std::string& token) {
  if (!token.empty() && token.find_first_of(" \t\"") == std::string::npos) return token;
  std::string out = "\"";
  for (char c : token) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

/// Collects the resolved command line in canonical order.
class Echo {
 public:
  explicit Echo(std::string command) { tokens_.push_back(std::move(command)); }
  Echo& word(const std::string& w) {
    tokens_.push_back(w);
    return *this;
  }
  Echo& flag(const std::string& name, const std::string& value) {
    tokens_.push_back("--" + name);
    tokens_.push_back(value);
    return *this;
  }
  Echo& flag(const std::string& name, double value) { return flag(name, format_double(value)); }
  Echo& flag(const std::string& name, long long value) { return flag(name, std::to_string(value)); }
  Echo& flag(const std::string& name, std::uint64_t value) { return flag(name, std::to_string(value)); }
  Echo& flag(const std::string& name, int value) { return flag(name, std::to_string(value)); }

  void print(std::ostream& out) const {
    out << kRunspecPrefix;
    for (const auto& t : tokens_) out << ' ' << quote(t);
    out << '\n';
  }

 private:
  std::vector<std::string> tokens_;
};

struct NamedGraph {
  std::string name;
  Graph graph;
};

/// Generator shorthands (grid2d[:RxC], ring[:N], sensor[:N], er:N:p) or a file path.
NamedGraph resolve_graph(const std::string& spec, std::uint64_t seed) {
  const auto parts = split(spec, ':');
  const std::string kind = parts.empty() ? spec : parts[0];
  if (kind == "grid2d") {
    Index rows = 8, cols = 8;
    if (parts.size() > 1) {
      const auto dims = split(parts[1], 'x');
      if (dims.size() != 2) throw std::invalid_argument("grid2d expects grid2d:RxC");
      rows = parse_number<Index>("rows", dims[0]);
      cols = parse_number<Index>("cols", dims[1]);
    }
    return {spec, build_grid2d(rows, cols)};
  }
  if (kind == "ring")
    return {spec, build_ring(parts.size() > 1 ? parse_number<Index>("ring size", parts[1]) : 64)};
  if (kind == "sensor")
    return {spec, build_sensor(parts.size() > 1 ? parse_number<Index>("sensor size", parts[1]) : 64, seed)};
  if (kind == "er") {
    if (parts.size() != 3) throw std::invalid_argument("er expects er:N:p");
    return {spec, build_erdos_renyi(parse_number<Index>("er size", parts[1]),
                                    parse_number<double>("er probability", parts[2]), seed, 2)};
  }
  if (!fs::exists(spec)) throw std::invalid_argument("no such graph file or generator: '" + spec + "'");
  return {fs::path(spec).stem().string(), load_graph(spec)};
}

/// Parses `key=value` and `op.key=value` hyperparameters for one operator.
std::map<std::string, std::string> op_args_for(const std::string& op,
                                               const std::vector<std::string>& raw) {
  std::map<std::string, std::string> out;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--op-arg expects key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      if (key.substr(0, dot) != op) continue;
      key = key.substr(dot + 1);
    }
    out[key] = value;
  }
  return out;
}

std::vector<std::string> canonical_op_args(std::vector<std::string> raw) {
  std::sort(raw.begin(), raw.end());
  return raw;
}

LossKind parse_loss(const std::string& name) {
  if (name == "spectral") return LossKind::Spectral;
  if (name == "reconstruction") return LossKind::Reconstruction;
  if (name == "aux") return LossKind::AuxOnly;
  throw std::invalid_argument("loss must be spectral, reconstruction or aux");
}

/// Features the objective expects: the spectral signal or the positions.
Graph prepare_for_loss(const Graph& g, LossKind loss) {
  if (loss == LossKind::Reconstruction) return g.with_features(g.positions());
  if (loss == LossKind::Spectral) return g.with_features(signal_matrix(g));
  return g;
}

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << content;
}

// ------------------------------------------------------------ options

struct OperatorOptions {
  std::string op;
  std::optional<long long> k;
  double ratio = 0.5;
  std::vector<std::string> op_args;

  void add_to(CLI::App* cmd, bool op_required) {
    auto* o = cmd->add_option("--op", op, "Operator id");
    if (op_required) o->required();
    cmd->add_option("--k", k, "Supernode count for fixed operators");
    cmd->add_option("--ratio", ratio, "Pooling ratio for adaptive operators")->capture_default_str();
    cmd->add_option("--op-arg", op_args, "Operator hyperparameter key=value (repeatable)");
  }

  OperatorConfig config(const std::string& id, std::uint64_t seed) const {
    OperatorConfig cfg;
    if (k) cfg.k = static_cast<Index>(*k);
    cfg.ratio = ratio;
    cfg.seed = seed;
    cfg.args = op_args_for(id, op_args);
    return cfg;
  }

  void echo(Echo& e, bool with_op) const {
    if (with_op) e.flag("op", op);
    if (k) e.flag("k", *k);
    e.flag("ratio", ratio);
    for (const auto& a : canonical_op_args(op_args)) e.flag("op-arg", a);
  }
};

struct TrainOptions {
  std::optional<double> lr;
  std::optional<int> epochs;
  std::optional<int> patience;
  std::optional<double> tol;
  bool no_aux = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lr", lr, "Learning rate");
    cmd->add_option("--epochs", epochs, "Maximum epochs");
    cmd->add_option("--patience", patience, "Early-stopping patience");
    cmd->add_option("--tol", tol, "Early-stopping tolerance");
    cmd->add_flag("--no-aux", no_aux, "Exclude auxiliary losses");
  }

  TrainConfig resolve(TrainConfig base, std::uint64_t seed) const {
    if (lr) base.learning_rate = *lr;
    if (epochs) base.max_epochs = *epochs;
    if (patience) base.patience = *patience;
    if (tol) base.tol = *tol;
    if (no_aux) base.include_aux = false;
    base.seed = seed;
    return base;
  }

  static void echo(Echo& e, const TrainConfig& cfg) {
    e.flag("lr", cfg.learning_rate)
        .flag("epochs", cfg.max_epochs)
        .flag("patience", cfg.patience)
        .flag("tol", cfg.tol);
    if (!cfg.include_aux) e.word("--no-aux");
  }
};

// ------------------------------------------------------------ commands

struct GenCommand {
  std::string kind;
  long long rows = 8, cols = 8, n = 64, features = 1;
  double p = 0.1;
  std::uint64_t seed = 42;
  std::string out_path;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("gen", "Generate a benchmark graph");
    cmd->add_option("kind", kind, "grid2d | ring | sensor | er")->required()
        ->check(CLI::IsMember({"grid2d", "ring", "sensor", "er"}));
    cmd->add_option("--rows", rows)->capture_default_str();
    cmd->add_option("--cols", cols)->capture_default_str();
    cmd->add_option("--n", n, "Node count (ring, sensor, er)")->capture_default_str();
    cmd->add_option("--p", p, "Edge probability (er)")->capture_default_str();
    cmd->add_option("--features", features, "Feature width (er)")->capture_default_str();
    cmd->add_option("--seed", seed)->capture_default_str();
    cmd->add_option("-o,--out", out_path, "Output file (default: stdout)");
  }

  int run(std::ostream& out) const {
    Echo e("gen");
    e.word(kind);
    Graph g;
    if (kind == "grid2d") {
      e.flag("rows", rows).flag("cols", cols);
      g = build_grid2d(rows, cols);
    } else if (kind == "ring") {
      e.flag("n", n);
      g = build_ring(n);
    } else if (kind == "sensor") {
      e.flag("n", n).flag("seed", seed);
      g = build_sensor(n, seed);
    } else {
      e.flag("n", n).flag("p", p).flag("features", features).flag("seed", seed);
      g = build_erdos_renyi(n, p, seed, features);
    }
    if (!out_path.empty()) e.flag("out", out_path);
    e.print(out);
    if (out_path.empty()) {
      write_graph(out, g);
    } else {
      save_graph(g, out_path);
      out << "wrote " << out_path << ": N=" << g.num_nodes() << " edges=" << g.num_edges() << '\n';
    }
    return kOk;
  }
};

struct PoolCommand {
  std::string graph;
  OperatorOptions op;
  std::uint64_t seed = 42;
  std::string out_path;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("pool", "Apply one pooling operator to a graph");
    cmd->add_option("graph", graph, "Graph file or generator (grid2d, ring, sensor, er:N:p)")->required();
    op.add_to(cmd, true);
    cmd->add_option("--seed", seed)->capture_default_str();
    cmd->add_option("-o,--out", out_path, "Write the pooled graph to this file");
  }

  int run(std::ostream& out) const {
    Echo e("pool");
    e.word(graph);
    op.echo(e, true);
    e.flag("seed", seed);
    if (!out_path.empty()) e.flag("out", out_path);
    e.print(out);

    const NamedGraph ng = resolve_graph(graph, seed);
    const Graph& g = ng.graph;
    const auto pooling =
        make_operator(op.op, op.config(op.op, seed), {g.num_nodes(), g.num_features()});
    const PooledGraph pooled = pool(g, *pooling);
    const StructureStats stats = structure_stats(pooled.a);
    out << "operator=" << op.op << " N=" << g.num_nodes() << " K=" << pooled.num_supernodes()
        << " edges=" << stats.num_edges
        << " selection_density=" << format_double(density_of(pooled.selection, g.num_nodes()))
        << " edge_density=" << format_double(stats.edge_density)
        << " storage=" << storage_count(pooled.selection) << '\n';
    if (!out_path.empty()) save_graph(pooled.to_graph(), out_path);
    return kOk;
  }
};

struct EvalCommand {
  std::string experiment;
  std::vector<std::string> graphs;
  std::vector<std::string> ops;
  OperatorOptions op;
  TrainOptions train;
  std::vector<std::string> sizes;
  double p = 0.1;
  std::uint64_t seed = 42;
  int workers = 1;
  std::string out_dir = "results";

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Run an experiment sweep");
    cmd->add_option("experiment", experiment, "ae | spectral | storage")->required()
        ->check(CLI::IsMember({"ae", "spectral", "storage"}));
    cmd->add_option("--graph", graphs, "Graphs (comma-separated or repeated)");
    cmd->add_option("--ops", ops, "Operator ids (comma-separated)");
    op.add_to(cmd, false);
    train.add_to(cmd);
    cmd->add_option("--sizes", sizes, "Node counts for the storage probe");
    cmd->add_option("--p", p, "Edge probability for the storage probe")->capture_default_str();
    cmd->add_option("--seed", seed)->capture_default_str();
    cmd->add_option("--workers", workers, "Parallel runs")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  }

  std::vector<std::string> resolved_ops() const {
    std::vector<std::string> out = split_all(ops);
    if (!op.op.empty()) out.push_back(op.op);
    if (out.empty()) {
      if (experiment == "storage") out = {"mincut", "diffpool", "topk", "sagpool"};
      else
        for (auto id : operator_ids()) out.emplace_back(id);
    }
    return out;
  }

  int run(std::ostream& out) const {
    const auto op_list = resolved_ops();
    Echo e("eval");
    e.word(experiment).flag("ops", join(op_list, ','));
    op.echo(e, false);

    if (experiment == "storage") {
      std::vector<Index> ns;
      for (const auto& s : split_all(sizes.empty() ? std::vector<std::string>{"1000,2000,4000,8000"} : sizes))
        ns.push_back(parse_number<Index>("size", s));
      std::vector<std::string> size_tokens;
      for (Index n : ns) size_tokens.push_back(std::to_string(n));
      e.flag("sizes", join(size_tokens, ',')).flag("p", p).flag("seed", seed).flag("out", out_dir);
      e.print(out);

      std::vector<StorageProbe> probes;
      for (const auto& id : op_list) probes.push_back(storage_probe(id, ns, p, seed, op.config(id, seed)));
      std::ostringstream csv;
      write_storage_csv(csv, probes);
      write_file(fs::path(out_dir) / "storage.csv", csv.str());
      out << csv.str();
      return kOk;
    }

    const Experiment kind = experiment == "ae" ? Experiment::Autoencoder : Experiment::Spectral;
    const TrainConfig tc = train.resolve(
        kind == Experiment::Spectral ? spectral_train_defaults() : reconstruction_train_defaults(), seed);
    auto graph_list = split_all(graphs);
    if (graph_list.empty()) graph_list = {"grid2d", "ring"};
    e.flag("graph", join(graph_list, ','));
    TrainOptions::echo(e, tc);
    e.flag("seed", seed).flag("workers", workers).flag("out", out_dir);
    e.print(out);

    std::vector<ExperimentJob> jobs;
    for (const auto& spec : graph_list) {
      const NamedGraph ng = resolve_graph(spec, seed);
      for (const auto& id : op_list) {
        // Validate ids and hyperparameters before anything runs.
        (void)make_operator(id, op.config(id, seed), {ng.graph.num_nodes(), ng.graph.num_features()});
        jobs.push_back({ng.name, ng.graph, id, op.config(id, seed), tc, kind});
      }
    }
    const auto reports = run_sweep(jobs, workers);

    std::ostringstream csv;
    write_reports_csv(csv, reports);
    const fs::path dir(out_dir);
    write_file(dir / (experiment + ".csv"), csv.str());

    std::vector<std::pair<std::string, std::vector<double>>> curves;
    for (const auto& r : reports) {
      const std::string stem = safe_name(r.graph_name) + "_" + r.operator_id;
      if (kind == Experiment::Spectral && r.ok()) {
        std::ostringstream svg;
        write_spectrum_svg(svg, r);
        write_file(dir / "spectra" / (stem + ".svg"), svg.str());
      }
      if (!r.loss_curve.empty()) {
        std::ostringstream curve;
        write_loss_curve_csv(curve, r.loss_curve);
        write_file(dir / "curves" / (experiment + "_" + stem + ".csv"), curve.str());
        curves.emplace_back(r.graph_name + "/" + r.operator_id, r.loss_curve);
      }
    }
    if (!curves.empty()) {
      std::ostringstream svg;
      write_loss_curves_svg(svg, curves);
      write_file(dir / (experiment + "_loss_curves.svg"), svg.str());
    }

    for (const auto& r : reports) {
      out << r.graph_name << ' ' << r.operator_id << ' ' << r.status;
      if (r.ok()) {
        out << " K=" << r.k;
        if (r.mse) out << " mse=" << format_double(*r.mse) << " gamma=" << format_double(*r.gamma)
                       << (r.mse_exceeds_gamma() ? " (mse > gamma)" : "");
        if (r.quad_loss) out << " quad_loss=" << format_double(*r.quad_loss);
        if (r.edge_density) out << " density=" << format_double(*r.edge_density);
        if (r.median_weight) out << " median=" << format_double(*r.median_weight);
      }
      out << '\n';
    }
    out << "wrote " << (dir / (experiment + ".csv")).string() << '\n';
    return kOk;
  }
};

struct TrainCommand {
  std::string graph = "grid2d";
  OperatorOptions op;
  TrainOptions train;
  std::string loss = "spectral";
  std::uint64_t seed = 42;
  std::string out_path;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train one operator and emit its loss curve");
    cmd->add_option("--graph", graph)->capture_default_str();
    op.add_to(cmd, true);
    train.add_to(cmd);
    cmd->add_option("--loss", loss, "spectral | reconstruction | aux")->capture_default_str();
    cmd->add_option("--seed", seed)->capture_default_str();
    cmd->add_option("-o,--out", out_path, "Loss-curve CSV (default: stdout)");
  }

  int run(std::ostream& out) const {
    const LossKind kind = parse_loss(loss);
    const TrainConfig tc = train.resolve(
        kind == LossKind::Reconstruction ? reconstruction_train_defaults() : spectral_train_defaults(), seed);
    Echo e("train");
    e.flag("graph", graph);
    op.echo(e, true);
    e.flag("loss", loss);
    TrainOptions::echo(e, tc);
    e.flag("seed", seed);
    if (!out_path.empty()) e.flag("out", out_path);
    e.print(out);

    const NamedGraph ng = resolve_graph(graph, seed);
    const Graph g = prepare_for_loss(ng.graph, kind);
    auto pooling = make_operator(op.op, op.config(op.op, seed), {g.num_nodes(), g.num_features()});
    auto* trainable = dynamic_cast<TrainablePooling*>(pooling.get());
    if (!trainable) throw std::invalid_argument("operator '" + op.op + "' has no trainable parameters");
    TrainConfig run_cfg = tc;
    run_cfg.loss = kind;
    const TrainResult res = srcpool::train(*trainable, g, run_cfg);

    std::ostringstream curve;
    write_loss_curve_csv(curve, res.loss_curve);
    if (out_path.empty()) out << curve.str();
    else write_file(out_path, curve.str());

    out << "epochs=" << res.loss_curve.size() << " best_loss=" << format_double(res.best_loss)
        << " best_epoch=" << res.best_epoch;
    if (kind == LossKind::Spectral)
      out << " quad_loss=" << format_double(quadratic_loss(g, pool(g, *pooling)).value);
    out << '\n';
    return kOk;
  }
};

struct GradcheckCommand {
  std::string graph = "sensor:8";
  OperatorOptions op;
  std::string loss = "spectral";
  bool no_aux = false;
  std::uint64_t seed = 42;
  long long max_params = 200;
  double step = 1e-5;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
    cmd->add_option("--graph", graph)->capture_default_str();
    op.add_to(cmd, true);
    cmd->add_option("--loss", loss, "spectral | reconstruction | aux")->capture_default_str();
    cmd->add_flag("--no-aux", no_aux, "Exclude auxiliary losses");
    cmd->add_option("--seed", seed)->capture_default_str();
    cmd->add_option("--max-params", max_params)->capture_default_str();
    cmd->add_option("--step", step)->capture_default_str();
  }

  int run(std::ostream& out) const {
    const LossKind kind = parse_loss(loss);
    Echo e("gradcheck");
    e.flag("graph", graph);
    op.echo(e, true);
    e.flag("loss", loss);
    if (no_aux) e.word("--no-aux");
    e.flag("seed", seed).flag("max-params", max_params).flag("step", step);
    e.print(out);

    const NamedGraph ng = resolve_graph(graph, seed);
    const Graph g = prepare_for_loss(ng.graph, kind);
    OperatorConfig cfg = op.config(op.op, seed);
    if (!cfg.k && !op.k) cfg.k = std::max<Index>(1, g.num_nodes() / 2);
    auto pooling = make_operator(op.op, cfg, {g.num_nodes(), g.num_features()});
    auto* trainable = dynamic_cast<TrainablePooling*>(pooling.get());
    if (!trainable) throw std::invalid_argument("operator '" + op.op + "' has no trainable parameters");
    const auto objective = make_objective(kind, g, !no_aux);
    GradCheckConfig gc;
    gc.step = step;
    gc.max_params = static_cast<Index>(max_params);
    gc.seed = seed;
    const GradCheckResult res = gradient_check(*trainable, g, *objective, gc);
    out << "checked=" << res.checked << " max_rel_error=" << format_double(res.max_rel_error) << '\n';
    return kOk;
  }
};

}  // namespace

std::vector<std::string> parse_runspec(const std::string& line) {
  std::string_view body = line;
  if (body.starts_with(kRunspecPrefix)) body.remove_prefix(kRunspecPrefix.size());
  std::vector<std::string> out;
  std::string current;
  bool in_token = false, quoted = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (quoted) {
      if (c == '\\' && i + 1 < body.size()) current += body[++i];
      else if (c == '"') quoted = false;
      else current += c;
    } else if (c == '"') {
      quoted = in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (in_token) out.push_back(std::move(current));
      current.clear();
      in_token = false;
    } else {
      current += c;
      in_token = true;
    }
  }
  if (in_token) out.push_back(std::move(current));
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"srcpool: graph pooling as select, reduce, connect"};
  app.name("srcpool");
  app.require_subcommand(1);

  GenCommand gen;
  PoolCommand pool_cmd;
  EvalCommand eval;
  TrainCommand train_cmd;
  GradcheckCommand gradcheck;
  gen.add_to(app);
  pool_cmd.add_to(app);
  eval.add_to(app);
  train_cmd.add_to(app);
  gradcheck.add_to(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (app.got_subcommand("gen")) return gen.run(out);
    if (app.got_subcommand("pool")) return pool_cmd.run(out);
    if (app.got_subcommand("eval")) return eval.run(out);
    if (app.got_subcommand("train")) return train_cmd.run(out);
    if (app.got_subcommand("gradcheck")) return gradcheck.run(out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace srcpool::cli

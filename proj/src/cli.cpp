#include "dualmix/cli.hpp"

#include "dualmix/errors.hpp"
#include "dualmix/io.hpp"
#include "dualmix/simulate.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace dualmix {

namespace {

constexpr const char* kEnvironmentHelp =
    "Environment overrides:\n"
    "  DUALMIX_EM_TOL         relative log-likelihood change that stops EM (1e-8)\n"
    "  DUALMIX_BMM_MAX_ITER   EM iteration cap for Borel mixtures (1000)\n"
    "  DUALMIX_KMM_MAX_ITER   EM iteration cap for kernel mixtures (200)\n"
    "  DUALMIX_INNER_EVALS    objective evaluations per kernel M-step (200)\n"
    "  DUALMIX_EPS_P          Poisson truncation threshold for size laws (1e-10)\n"
    "Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.";

template <typename T>
void env_override(const char* name, T& target) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return;
  std::istringstream in(raw);
  T value{};
  if (!(in >> value) || !in.eof() || !(value > T{})) {
    throw UsageError(std::string("invalid value for ") + name + ": '" + raw + "'");
  }
  target = value;
}

// RFC 4180 quoting where needed.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

std::pair<int, int> parse_k_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int k = std::stoi(text);
      return {k, k};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("--select-k expects a range like 1..5, got '" + text + "'");
  }
}

// Runs task(i) for i in [0, n) on `jobs` threads; the first failure (in
// index order) is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < std::min(count, n); ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

struct SimulateArgs {
  double n_star = 0.0;
  std::string kernel = "exp";
  double theta = 1.0;
  double c = 1.0;
  std::int64_t num_cascades = 0;
  std::int64_t items = 1;
  std::int64_t publishers = 1;
  std::uint64_t seed = 0;
  std::int64_t max_events = 1'000'000;
  std::string out;
};

int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.n_star >= 0.0 && a.n_star < 1.0)) throw UsageError("--n-star must lie in [0, 1)");
  if (a.num_cascades < 0) throw UsageError("--num-cascades must be >= 0");
  if (a.items < 1 || a.publishers < 1) throw UsageError("--items and --publishers must be >= 1");
  if (a.max_events < 1) throw UsageError("--max-events must be >= 1");
  KernelParams kernel;
  try {
    const KernelFamily family = parse_kernel_family(a.kernel);
    kernel = family == KernelFamily::kExponential ? KernelParams::exponential(a.theta)
                                                  : KernelParams::power_law(a.theta, a.c);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  SimConfig config{BranchingFactor(a.n_star), kernel, a.max_events, a.seed, std::nullopt};
  std::string text;
  std::int64_t truncated = 0;
  for (std::int64_t i = 0; i < a.num_cascades; ++i) {
    Rng rng = make_stream(a.seed, static_cast<std::uint64_t>(i));
    SimulatedCascade sim = simulate_cascade(config, rng);
    truncated += sim.truncated ? 1 : 0;
    const std::int64_t item = i % a.items;
    CascadeRecord record{"item-" + std::to_string(item),
                         "pub-" + std::to_string(item % a.publishers),
                         "c-" + std::to_string(i), std::move(sim.cascade)};
    text += to_jsonl_line(record);
    text += '\n';
  }
  if (truncated > 0) err << "warning: " << truncated << " cascades hit --max-events\n";
  emit(a.out, text, out);
  return 0;
}

struct FitArgs {
  std::string input;
  std::string group_by = "item";
  std::string kernel = "exp";
  std::optional<int> k;
  std::string select_k;
  std::optional<int> kmm_k;
  int restarts = 5;
  std::uint64_t seed = 0;
  int bins = 10;
  int max_items = 5;
  int jobs = 1;
  std::string solver = "simplex";
  std::string out;
};

ItemFit fit_item(const CascadeGroup& group, KernelFamily family, const FitArgs& a,
                 std::pair<int, int> k_range, EmConfig em) {
  ItemFit item;
  item.item_id = group.item_id;
  item.publisher_id = group.publisher_id;
  item.cascade_count = static_cast<std::int64_t>(group.cascades.size());
  const auto sizes = cascade_sizes(group.cascades);

  if (a.k) {
    BmmFit fit = fit_bmm(sizes, *a.k, em);
    const double ll = fit.report.final_log_likelihood;
    item.aic.push_back({*a.k, ll, 2.0 * *a.k - 2.0 * ll});
    item.borel = std::move(fit.mixture);
    item.bmm_report = std::move(fit.report);
  } else {
    KSelection sel = select_k_bmm(sizes, k_range.first, k_range.second, em);
    item.aic = std::move(sel.table);
    item.borel = std::move(sel.best.mixture);
    item.bmm_report = std::move(sel.best.report);
  }

  const int kernel_k = a.kmm_k.value_or(static_cast<int>(item.borel.components.size()));
  try {
    KmmFit fit = fit_kmm(group.cascades, kernel_k, family, em);
    item.kernel = std::move(fit.mixture);
    item.kmm_report = std::move(fit.report);
  } catch (const DataError&) {
    item.kmm_status = "insufficient_data";
  } catch (const NumericalError& e) {
    item.kmm_status = std::string("failed: ") + e.what();
  }
  return item;
}

int run_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  if (a.group_by != "item" && a.group_by != "publisher") {
    throw UsageError("--group-by must be 'item' or 'publisher'");
  }
  KernelFamily family;
  try {
    family = parse_kernel_family(a.kernel);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  EmConfig em;
  em.restarts = a.restarts;
  if (a.solver == "simplex") {
    em.kernel_fit.solver = KernelSolver::kNelderMead;
  } else if (a.solver == "quasi-newton") {
    em.kernel_fit.solver = KernelSolver::kQuasiNewton;
  } else {
    throw UsageError("--solver must be 'simplex' or 'quasi-newton'");
  }
  env_override("DUALMIX_EM_TOL", em.tolerance);
  env_override("DUALMIX_BMM_MAX_ITER", em.bmm_max_iterations);
  env_override("DUALMIX_KMM_MAX_ITER", em.kmm_max_iterations);
  env_override("DUALMIX_INNER_EVALS", em.kernel_fit.optimize.max_evaluations);

  const auto k_range = parse_k_range(a.select_k.empty() ? "1..5" : a.select_k);
  for (int k : {k_range.first, k_range.second, a.k.value_or(1), a.kmm_k.value_or(1)}) {
    if (k < 1 || k > em.max_components || k_range.first > k_range.second) {
      throw UsageError("component counts must lie in [1, " + std::to_string(em.max_components) + "]");
    }
  }

  const auto records = read_cascades_jsonl(std::filesystem::path(a.input));
  const auto groups =
      group_records(records, a.group_by == "item" ? GroupBy::kItem : GroupBy::kPublisher);

  ModelFile model;
  model.family = family;
  model.items.resize(groups.size());
  parallel_for(groups.size(), a.jobs, [&](std::size_t i) {
    EmConfig item_em = em;
    item_em.seed = make_stream(a.seed, i)();
    model.items[i] = fit_item(groups[i], family, a, k_range, item_em);
  });

  std::vector<BorelMixture> borels;
  std::vector<KernelMixture> kernels;
  for (const auto& item : model.items) {
    borels.push_back(item.borel);
    if (item.kernel) kernels.push_back(*item.kernel);
  }
  model.edges = corpus_bin_edges(borels, kernels, a.bins);

  std::vector<std::string> publisher_order;
  std::map<std::string, std::vector<ItemModel>> by_publisher;
  for (const auto& item : model.items) {
    auto [it, inserted] = by_publisher.try_emplace(item.publisher_id);
    if (inserted) publisher_order.push_back(item.publisher_id);
    it->second.push_back({item.item_id, item.borel, item.kernel, item.cascade_count});
  }
  for (const auto& id : publisher_order) {
    try {
      model.publishers.push_back(
          {id, pool_publisher_model(by_publisher[id], PoolOptions{a.max_items, std::nullopt})});
    } catch (const DataError& e) {
      err << "warning: publisher " << id << " not pooled: " << e.what() << '\n';
    }
  }

  emit(a.out, to_json(model).dump(2) + "\n", out);
  return 0;
}

struct EmbedArgs {
  std::string model;
  std::optional<int> bins;
  std::string out;
};

int run_embed(const EmbedArgs& a, std::ostream& out) {
  const ModelFile model = read_model(a.model);
  BinEdges edges = model.edges;
  if (a.bins && *a.bins != edges.bins()) {
    if (*a.bins < 1) throw UsageError("--bins must be >= 1");
    std::vector<BorelMixture> borels;
    std::vector<KernelMixture> kernels;
    for (const auto& item : model.items) {
      borels.push_back(item.borel);
      if (item.kernel) kernels.push_back(*item.kernel);
    }
    edges = corpus_bin_edges(borels, kernels, *a.bins);
  }
  const int bins = edges.bins();
  std::string text = "item_id,publisher_id,flags";
  for (const char* block : {"n_star", "c", "theta"}) {
    for (int i = 1; i <= bins; ++i) text += std::string(",") + block + "_" + std::to_string(i);
  }
  text += '\n';
  for (const auto& item : model.items) {
    const DiffusionEmbedding e = build_embedding(item.borel, item.kernel.value_or(KernelMixture{}), edges);
    std::string flags;
    if (e.out_of_range) flags = "out_of_range";
    if (e.kernel_missing) flags += flags.empty() ? "no_kmm" : "|no_kmm";
    text += csv_field(item.item_id) + "," + csv_field(item.publisher_id) + "," +
            (flags.empty() ? "ok" : flags);
    for (const Eigen::VectorXd* v : {&e.n_star, &e.c, &e.theta}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) text += "," + format_number((*v)[i]);
    }
    text += '\n';
  }
  emit(a.out, text, out);
  return 0;
}

std::map<std::string, DiffusionEmbedding> read_embeddings(const std::string& path,
                                                          std::vector<std::string>& order) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty embeddings file");
  const auto header = split_csv_line(line);
  if (header.size() < 6 || (header.size() - 3) % 3 != 0) {
    throw DataError(path + ":1: unexpected embeddings header");
  }
  const auto bins = static_cast<Eigen::Index>((header.size() - 3) / 3);
  // One file shares one set of corpus edges; only their count matters here.
  const BinEdges edges{Eigen::VectorXd::Zero(bins + 1), Eigen::VectorXd::Zero(bins + 1),
                       Eigen::VectorXd::Zero(bins + 1)};
  std::map<std::string, DiffusionEmbedding> out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(number) + ": wrong number of columns");
    }
    DiffusionEmbedding e;
    e.edges = edges;
    Eigen::VectorXd* blocks[] = {&e.n_star, &e.c, &e.theta};
    for (int b = 0; b < 3; ++b) {
      blocks[b]->resize(bins);
      for (Eigen::Index i = 0; i < bins; ++i) {
        try {
          (*blocks[b])[i] = std::stod(fields[3 + static_cast<std::size_t>(b * bins + i)]);
        } catch (const std::exception&) {
          throw DataError(path + ":" + std::to_string(number) + ": non-numeric weight");
        }
      }
    }
    if (out.emplace(fields[0], std::move(e)).second) order.push_back(fields[0]);
  }
  return out;
}

struct DistArgs {
  std::string embeddings;
  std::string pairs = "all";
  std::string out = "-";
};

int run_dist(const DistArgs& a, std::ostream& out) {
  std::vector<std::string> order;
  const auto embeddings = read_embeddings(a.embeddings, order);
  std::vector<std::pair<std::string, std::string>> pairs;
  if (a.pairs == "all") {
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = i + 1; j < order.size(); ++j) pairs.emplace_back(order[i], order[j]);
    }
  } else {
    std::ifstream in(a.pairs);
    if (!in) throw DataError("cannot open " + a.pairs);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = split_csv_line(line);
      if (fields.size() != 2) throw DataError(a.pairs + ": each line needs two item ids");
      pairs.emplace_back(fields[0], fields[1]);
    }
  }
  std::string text = "item_a,item_b,distance,error\n";
  for (const auto& [x, y] : pairs) {
    text += csv_field(x) + "," + csv_field(y) + ",";
    const auto ex = embeddings.find(x);
    const auto ey = embeddings.find(y);
    if (ex == embeddings.end() || ey == embeddings.end()) {
      text += ",unknown item " + csv_field(ex == embeddings.end() ? x : y) + "\n";
      continue;
    }
    text += format_number(embedding_distance(ex->second, ey->second)) + ",\n";
  }
  emit(a.out, text, out);
  return 0;
}

const PublisherEntry& require_publisher(const ModelFile& model, const std::string& id) {
  if (const auto* p = model.find_publisher(id)) return *p;
  std::string known;
  for (const auto& p : model.publishers) known += (known.empty() ? "" : ", ") + p.publisher_id;
  throw DataError("unknown publisher '" + id + "'; known publishers: " + known);
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("--at-time must be a positive number");
}

struct PredictArgs {
  std::string model;
  std::string publisher;
  std::string observed;
  double at_time = 0.0;
  std::string out = "-";
};

int run_predict(const PredictArgs& a, std::ostream& out) {
  check_time(a.at_time);
  PosteriorOptions posterior;
  env_override("DUALMIX_EPS_P", posterior.eps_p);
  const ModelFile model = read_model(a.model);
  const PublisherEntry& pool = require_publisher(model, a.publisher);
  const auto records = read_cascades_jsonl(std::filesystem::path(a.observed));
  const auto groups = group_records(records, GroupBy::kItem);

  std::string text = "item_id,at_time,predicted_mean,predicted_variance,observed_count\n";
  for (const auto& g : groups) {
    std::vector<Cascade> observed;
    for (const auto& c : g.cascades) observed.push_back(truncate(c, a.at_time));
    const ItemForecast f = predict_item(pool.model, observed, a.at_time, posterior);
    text += csv_field(g.item_id) + "," + format_number(a.at_time) + "," + format_number(f.mean) +
            "," + format_number(f.variance) + "," + std::to_string(f.observed) + "\n";
  }
  emit(a.out, text, out);
  return 0;
}

struct HoldoutArgs {
  std::string model;
  std::string cascades;
  std::string publisher;
  double at_time = 0.0;
  std::string out = "-";
};

int run_eval_holdout(const HoldoutArgs& a, std::ostream& out) {
  check_time(a.at_time);
  const ModelFile model = read_model(a.model);
  const auto records = read_cascades_jsonl(std::filesystem::path(a.cascades));
  std::string text =
      "item_id,cascade_id,publisher_id,observed_events,holdout_events,expected_hll,"
      "hll_per_event,posterior_weights\n";
  for (const auto& r : records) {
    const std::string& publisher = a.publisher.empty() ? r.publisher_id : a.publisher;
    const PublisherEntry& pool = require_publisher(model, publisher);
    const HoldoutResult h = expected_holdout_ll(pool.model, r.cascade, a.at_time);
    std::string weights;
    for (Eigen::Index j = 0; j < h.posterior.size(); ++j) {
      weights += (j ? ";" : "") + format_number(h.posterior[j]);
    }
    text += csv_field(r.item_id) + "," + csv_field(r.cascade_id) + "," + csv_field(publisher) +
            "," + std::to_string(h.observed_events) + "," + std::to_string(h.holdout_events) + "," +
            format_number(h.expected_hll) + "," + format_number(h.hll_per_event) + "," + weights +
            "\n";
  }
  emit(a.out, text, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual mixture self-exciting models of reshare cascades", "dualmix"};
  app.footer(kEnvironmentHelp);
  app.require_subcommand(1);
  std::function<int()> action;

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate cascades from one Hawkes process");
  simulate->add_option("--n-star", sim.n_star, "Branching factor in [0, 1)")->required();
  simulate->add_option("--kernel", sim.kernel, "Kernel family: exp or pl")->capture_default_str();
  simulate->add_option("--theta", sim.theta, "Kernel decay parameter")->required();
  simulate->add_option("--c", sim.c, "Power-law cutoff")->capture_default_str();
  simulate->add_option("--num-cascades", sim.num_cascades, "Number of cascades")->required();
  simulate->add_option("--items", sim.items, "Items the cascades are spread over")->capture_default_str();
  simulate->add_option("--publishers", sim.publishers, "Publishers the items are spread over")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master RNG seed")->capture_default_str();
  simulate->add_option("--max-events", sim.max_events, "Event cap per cascade")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output JSONL path, or - for stdout")->required();
  simulate->callback([&] { action = [&] { return run_simulate(sim, out, err); }; });

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit dual mixture models per item");
  fit_cmd->add_option("--input", fit.input, "Cascade JSONL")->required();
  fit_cmd->add_option("--group-by", fit.group_by, "item or publisher")->capture_default_str();
  fit_cmd->add_option("--kernel", fit.kernel, "Kernel family: exp or pl")->capture_default_str();
  auto* k_opt = fit_cmd->add_option("--k", fit.k, "Fixed number of Borel components");
  fit_cmd->add_option("--select-k", fit.select_k, "AIC search range, e.g. 1..5 (default)")
      ->excludes(k_opt);
  fit_cmd->add_option("--kmm-k", fit.kmm_k, "Kernel components (default: the Borel count)");
  fit_cmd->add_option("--restarts", fit.restarts, "EM restarts")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Master RNG seed")->capture_default_str();
  fit_cmd->add_option("--bins", fit.bins, "Embedding quantile bins")->capture_default_str();
  fit_cmd->add_option("--max-items", fit.max_items, "Recent items pooled per publisher")
      ->capture_default_str();
  fit_cmd->add_option("--jobs", fit.jobs, "Worker threads")->capture_default_str();
  fit_cmd->add_option("--solver", fit.solver, "Kernel M-step: simplex or quasi-newton")
      ->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Model JSON path, or - for stdout")->required();
  fit_cmd->callback([&] { action = [&] { return run_fit(fit, out, err); }; });

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Write diffusion embeddings as CSV");
  embed_cmd->add_option("--model", embed.model, "Model JSON")->required();
  embed_cmd->add_option("--bins", embed.bins, "Quantile bins (default: the model's)");
  embed_cmd->add_option("--out", embed.out, "CSV path, or - for stdout")->required();
  embed_cmd->callback([&] { action = [&] { return run_embed(embed, out); }; });

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Embedding distances between items");
  dist_cmd->add_option("--embeddings", dist.embeddings, "Embeddings CSV")->required();
  dist_cmd->add_option("--pairs", dist.pairs, "CSV of item pairs, or 'all'")->capture_default_str();
  dist_cmd->add_option("--out", dist.out, "CSV path, or - for stdout")->capture_default_str();
  dist_cmd->callback([&] { action = [&] { return run_dist(dist, out); }; });

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Forecast final item popularity");
  predict_cmd->add_option("--model", predict.model, "Model JSON")->required();
  predict_cmd->add_option("--publisher", predict.publisher, "Publisher id")->required();
  predict_cmd->add_option("--observed", predict.observed, "Observed cascades JSONL")->required();
  predict_cmd->add_option("--at-time", predict.at_time, "Observation time in seconds")->required();
  predict_cmd->add_option("--out", predict.out, "CSV path, or - for stdout")->capture_default_str();
  predict_cmd->callback([&] { action = [&] { return run_predict(predict, out); }; });

  HoldoutArgs holdout;
  auto* holdout_cmd = app.add_subcommand("eval-holdout", "Expected holdout log-likelihood per cascade");
  holdout_cmd->add_option("--model", holdout.model, "Model JSON")->required();
  holdout_cmd->add_option("--cascades", holdout.cascades, "Full cascades JSONL")->required();
  holdout_cmd->add_option("--at-time", holdout.at_time, "Observation time in seconds")->required();
  holdout_cmd->add_option("--publisher", holdout.publisher, "Use this publisher for every cascade");
  holdout_cmd->add_option("--out", holdout.out, "CSV path, or - for stdout")->capture_default_str();
  holdout_cmd->callback([&] { action = [&] { return run_eval_holdout(holdout, out); }; });

  std::vector<std::string> storage{"dualmix"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(ErrorKind::kUsage);
  }

  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kData);
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kData);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kNumerical);
  }
}

}  // namespace dualmix

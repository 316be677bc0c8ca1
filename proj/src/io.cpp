#include "dualmix/io.hpp"

#include "dualmix/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace dualmix {

using nlohmann::json;

namespace {

std::string located(std::string_view source, std::size_t line, const std::string& message) {
  return std::string(source) + ":" + std::to_string(line) + ": " + message;
}

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw std::invalid_argument(std::string("missing string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

double finite_or_null_in(const json& j) {
  if (j.is_null()) return -std::numeric_limits<double>::infinity();
  return j.get<double>();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json borel_to_json(const BorelMixture& m) {
  json comps = json::array();
  for (const auto& c : m.components) {
    comps.push_back({{"n_star", c.n_star.value()}, {"weight", c.weight}});
  }
  return {{"components", comps}};
}

BorelMixture borel_from_json(const json& j) {
  BorelMixture m;
  for (const auto& c : j.at("components")) {
    m.components.push_back({BranchingFactor(c.at("n_star").get<double>()), c.at("weight").get<double>()});
  }
  validate(m);
  return m;
}

json kernel_to_json(const KernelMixture& m) {
  json comps = json::array();
  for (const auto& c : m.components) {
    json e = {{"theta", c.kernel.theta}, {"weight", c.weight}};
    if (c.kernel.family == KernelFamily::kPowerLaw) e["c"] = c.kernel.c;
    comps.push_back(e);
  }
  return {{"components", comps}};
}

KernelMixture kernel_from_json(const json& j, KernelFamily family) {
  KernelMixture m;
  for (const auto& c : j.at("components")) {
    const double theta = c.at("theta").get<double>();
    KernelParams k = family == KernelFamily::kExponential
                         ? KernelParams::exponential(theta)
                         : KernelParams::power_law(theta, c.at("c").get<double>());
    m.components.push_back({k, c.at("weight").get<double>()});
  }
  validate(m);
  return m;
}

json report_to_json(const FitReport& r) {
  json trace = json::array();
  for (double v : r.log_likelihood_trace) trace.push_back(number_or_null(v));
  return {{"final_log_likelihood", number_or_null(r.final_log_likelihood)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"collapsed", r.collapsed},
          {"over_parameterized", r.over_parameterized},
          {"restarts", r.restarts},
          {"log_likelihood_trace", trace}};
}

FitReport report_from_json(const json& j) {
  FitReport r;
  r.final_log_likelihood = finite_or_null_in(j.at("final_log_likelihood"));
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.collapsed = j.at("collapsed").get<bool>();
  r.over_parameterized = j.at("over_parameterized").get<bool>();
  r.restarts = j.at("restarts").get<int>();
  for (const auto& v : j.at("log_likelihood_trace")) r.log_likelihood_trace.push_back(finite_or_null_in(v));
  return r;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::vector<CascadeRecord> read_cascades_jsonl(std::istream& in, std::string_view source) {
  std::vector<CascadeRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
      if (!j.contains("times") || !j.at("times").is_array()) {
        throw std::invalid_argument("missing array field 'times'");
      }
      std::vector<double> times;
      for (const auto& t : j.at("times")) {
        if (!t.is_number()) throw std::invalid_argument("non-numeric event time");
        times.push_back(t.get<double>());
      }
      records.push_back({require_string(j, "item_id"), require_string(j, "publisher_id"),
                         require_string(j, "cascade_id"), Cascade(std::move(times))});
    } catch (const json::exception& e) {
      throw DataError(located(source, number, e.what()));
    } catch (const std::invalid_argument& e) {
      throw DataError(located(source, number, e.what()));
    }
  }
  return records;
}

std::vector<CascadeRecord> read_cascades_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_cascades_jsonl(in, path.string());
}

std::string to_jsonl_line(const CascadeRecord& record) {
  const auto t = record.cascade.times();
  const json j = {{"item_id", record.item_id},
                  {"publisher_id", record.publisher_id},
                  {"cascade_id", record.cascade_id},
                  {"times", std::vector<double>(t.begin(), t.end())}};
  return j.dump();
}

std::vector<CascadeGroup> group_records(std::span<const CascadeRecord> records, GroupBy by) {
  std::vector<CascadeGroup> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    const std::string& key = by == GroupBy::kItem ? r.item_id : r.publisher_id;
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      groups.push_back({by == GroupBy::kItem ? r.item_id : r.publisher_id, r.publisher_id, {}});
    }
    groups[it->second].cascades.push_back(r.cascade);
  }
  return groups;
}

const PublisherEntry* ModelFile::find_publisher(std::string_view id) const {
  for (const auto& p : publishers) {
    if (p.publisher_id == id) return &p;
  }
  return nullptr;
}

json to_json(const ModelFile& model) {
  json items = json::array();
  for (const auto& item : model.items) {
    json aic = json::array();
    for (const auto& a : item.aic) {
      aic.push_back({{"k", a.k}, {"log_likelihood", number_or_null(a.log_likelihood)},
                     {"aic", number_or_null(a.aic)}});
    }
    items.push_back({{"item_id", item.item_id},
                     {"publisher_id", item.publisher_id},
                     {"cascade_count", item.cascade_count},
                     {"bmm", borel_to_json(item.borel)},
                     {"bmm_report", report_to_json(item.bmm_report)},
                     {"aic", aic},
                     {"kmm", item.kernel ? kernel_to_json(*item.kernel) : json(nullptr)},
                     {"kmm_report", item.kmm_report ? report_to_json(*item.kmm_report) : json(nullptr)},
                     {"kmm_status", item.kmm_status}});
  }
  json publishers = json::array();
  for (const auto& p : model.publishers) {
    publishers.push_back({{"publisher_id", p.publisher_id},
                          {"source_items", p.model.source_items},
                          {"avg_cascades_per_item", p.model.avg_cascades_per_item},
                          {"bmm", borel_to_json(p.model.borel)},
                          {"kmm", kernel_to_json(p.model.kernel)}});
  }
  return {{"schema_version", model.schema_version},
          {"kernel_family", std::string(to_string(model.family))},
          {"items", items},
          {"embedding", {{"bins", model.edges.bins()},
                         {"bin_edges", {{"n_star", vector_to_json(model.edges.n_star)},
                                        {"c", vector_to_json(model.edges.c)},
                                        {"theta", vector_to_json(model.edges.theta)}}}}},
          {"publishers", publishers}};
}

ModelFile model_from_json(const json& j) {
  try {
    ModelFile model;
    model.schema_version = j.at("schema_version").get<int>();
    if (model.schema_version != kSchemaVersion) {
      throw DataError("unsupported model schema_version " + std::to_string(model.schema_version) +
                      " (expected " + std::to_string(kSchemaVersion) + ")");
    }
    model.family = parse_kernel_family(j.at("kernel_family").get<std::string>());
    for (const auto& e : j.at("items")) {
      ItemFit item;
      item.item_id = e.at("item_id").get<std::string>();
      item.publisher_id = e.at("publisher_id").get<std::string>();
      item.cascade_count = e.at("cascade_count").get<std::int64_t>();
      item.borel = borel_from_json(e.at("bmm"));
      item.bmm_report = report_from_json(e.at("bmm_report"));
      for (const auto& a : e.at("aic")) {
        item.aic.push_back({a.at("k").get<int>(), finite_or_null_in(a.at("log_likelihood")),
                            finite_or_null_in(a.at("aic"))});
      }
      if (!e.at("kmm").is_null()) item.kernel = kernel_from_json(e.at("kmm"), model.family);
      if (!e.at("kmm_report").is_null()) item.kmm_report = report_from_json(e.at("kmm_report"));
      item.kmm_status = e.at("kmm_status").get<std::string>();
      model.items.push_back(std::move(item));
    }
    const auto& edges = j.at("embedding").at("bin_edges");
    model.edges = {vector_from_json(edges.at("n_star")), vector_from_json(edges.at("c")),
                   vector_from_json(edges.at("theta"))};
    for (const auto& e : j.at("publishers")) {
      PublisherEntry p;
      p.publisher_id = e.at("publisher_id").get<std::string>();
      p.model.source_items = e.at("source_items").get<std::vector<std::string>>();
      p.model.avg_cascades_per_item = e.at("avg_cascades_per_item").get<double>();
      p.model.borel = borel_from_json(e.at("bmm"));
      p.model.kernel = kernel_from_json(e.at("kmm"), model.family);
      p.model.dual = assemble_dual(p.model.borel, p.model.kernel);
      model.publishers.push_back(std::move(p));
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

ModelFile read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path temp = path;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + temp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("failed writing " + temp.string());
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw DataError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

}  // namespace dualmix

#include <sstream>

#include <json.hpp>

#include "kernelrmt/csv_io.hpp"
#include "kernelrmt/errors.hpp"
#include "kernelrmt/experiment.hpp"

namespace kernelrmt {

namespace {

using json = nlohmann::json;

json record_to_json(const ExperimentRecord& r, bool include_timing) {
  json j = json::object();
  j["experiment"] = r.experiment;
  j["n"] = r.n;
  j["p"] = r.p;
  j["repeat"] = r.repeat;
  j["seed"] = r.seed;
  j["metrics"] = json::object();
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  if (include_timing) j["wall_time"] = r.wall_time;
  return j;
}

}  // namespace

OutputFormat format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("format must be 'csv' or 'json', got '" + s + "'");
}

std::string records_to_csv(ExperimentKind kind, const std::vector<ExperimentRecord>& records, bool include_timing) {
  const auto& cols = metric_columns(kind);
  std::ostringstream os;
  os << "experiment,n,p,repeat,seed";
  for (const auto& c : cols) os << ',' << c;
  if (include_timing) os << ",wall_time";
  os << '\n';
  for (const auto& r : records) {
    os << r.experiment << ',' << r.n << ',' << r.p << ',' << r.repeat << ',' << r.seed;
    for (const auto& c : cols) {
      const auto it = r.metrics.find(c);
      if (it == r.metrics.end()) throw ParameterError("records_to_csv: record lacks metric '" + c + "'");
      os << ',' << format_double(it->second);
    }
    if (include_timing) os << ',' << format_double(r.wall_time);
    os << '\n';
  }
  return os.str();
}

std::string records_to_json(const std::vector<ExperimentRecord>& records, bool include_timing) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_to_json(r, include_timing));
  return arr.dump(2) + "\n";
}

std::vector<ExperimentRecord> records_from_json(const std::string& text) {
  std::vector<ExperimentRecord> out;
  try {
    const json arr = json::parse(text);
    if (!arr.is_array()) throw IoError("records_from_json: expected an array");
    for (const auto& j : arr) {
      ExperimentRecord r;
      r.experiment = j.at("experiment").get<std::string>();
      r.n = j.at("n").get<std::size_t>();
      r.p = j.at("p").get<std::size_t>();
      r.repeat = j.at("repeat").get<std::size_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      for (const auto& item : j.at("metrics").items()) r.metrics[item.key()] = item.value().get<double>();
      if (j.contains("wall_time")) r.wall_time = j.at("wall_time").get<double>();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("records_from_json: ") + e.what());
  }
  return out;
}

std::string output_file_name(ExperimentKind kind, std::size_t n, std::size_t p, std::uint64_t seed,
                             OutputFormat format) {
  return to_string(kind) + "_" + std::to_string(n) + "x" + std::to_string(p) + "_" + std::to_string(seed) +
         (format == OutputFormat::csv ? ".csv" : ".json");
}

std::vector<std::filesystem::path> emit(const ExperimentConfig& cfg, const std::vector<ExperimentRecord>& records,
                                        OutputFormat format, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  for (const auto& [n, p] : cfg.dims) {
    std::vector<ExperimentRecord> cell;
    for (const auto& r : records)
      if (r.n == n && r.p == p) cell.push_back(r);
    const std::string text = format == OutputFormat::csv ? records_to_csv(cfg.experiment, cell, cfg.include_timing)
                                                         : records_to_json(cell, cfg.include_timing);
    const auto path = dir / output_file_name(cfg.experiment, n, p, cfg.seed, format);
    write_text_file(path, text);
    written.push_back(path);
  }
  return written;
}

}  // namespace kernelrmt

#include "nsinfer/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nsinfer/config.hpp"
#include "nsinfer/error.hpp"
#include "nsinfer/format.hpp"
#include "nsinfer/version.hpp"

namespace nsinfer {

namespace {

using nlohmann::json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json scenario_json(const ScenarioConfig& c) {
  std::vector<Index> group1;
  for (Index g : c.group) group1.push_back(g + 1);
  return json{{"method", to_string(c.method)},
              {"sample_mode", to_string(c.sample_mode)},
              {"n", c.n},
              {"p", c.p},
              {"design", c.design.to_string()},
              {"error_dist", c.error.to_string()},
              {"s", c.s},
              {"group", group1},
              {"h", c.h},
              {"scale_c", c.scale_c},
              {"alpha", c.alpha},
              {"reps", c.reps},
              {"seed", c.seed},
              {"draws", c.draws},
              {"eta", c.eta},
              {"rho0", c.rho0},
              {"lambda", c.lambda},
              {"wdl_sigma", to_string(c.wdl_sigma)},
              {"lp_max_iters", c.lp_max_iters},
              {"theta_rho", to_string(c.theta_rho)},
              {"pi_rho", to_string(c.pi_rho)}};
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  c.method = parse_method(j.at("method").get<std::string>());
  c.sample_mode = parse_sample_mode(j.at("sample_mode").get<std::string>());
  c.n = j.at("n").get<Index>();
  c.p = j.at("p").get<Index>();
  c.design = parse_design(j.at("design").get<std::string>());
  c.error = ErrorDist::parse(j.at("error_dist").get<std::string>());
  c.s = j.at("s").get<Index>();
  c.group.clear();
  for (const auto& g : j.at("group")) c.group.push_back(g.get<Index>() - 1);
  c.h = j.at("h").get<double>();
  c.scale_c = j.at("scale_c").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.reps = j.at("reps").get<Index>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.draws = j.at("draws").get<Index>();
  c.eta = j.at("eta").get<double>();
  c.rho0 = j.at("rho0").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.wdl_sigma = parse_wdl_sigma(j.at("wdl_sigma").get<std::string>());
  c.lp_max_iters = j.at("lp_max_iters").get<Index>();
  c.theta_rho = parse_optional_rho_mode(j.at("theta_rho").get<std::string>());
  c.pi_rho = parse_rho_mode(j.at("pi_rho").get<std::string>());
  return c;
}

json result_json(const ExperimentResult& r) {
  return json{{"scenario", scenario_json(r.scenario)},
              {"rejections", r.rejections},
              {"completed_reps", r.completed_reps},
              {"failed_reps", r.failed_reps},
              {"rejection_rate", r.rejection_rate},
              {"std_error", r.std_error},
              {"wall_time_seconds", r.wall_time_seconds},
              {"first_failure", r.first_failure}};
}

ExperimentResult result_from_json(const json& j) {
  ExperimentResult r;
  r.scenario = scenario_from_json(j.at("scenario"));
  r.rejections = j.at("rejections").get<Index>();
  r.completed_reps = j.at("completed_reps").get<Index>();
  r.failed_reps = j.at("failed_reps").get<Index>();
  r.rejection_rate = j.at("rejection_rate").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  r.first_failure = j.at("first_failure").get<std::string>();
  return r;
}

}  // namespace

std::string results_csv(const std::vector<ExperimentResult>& results) {
  std::ostringstream out;
  out << "method,design,error_dist,n,p,s,h,alpha,reps,rejection_rate,std_error,failed_reps,seed,wall_time_seconds\r\n";
  for (const ExperimentResult& r : results) {
    const ScenarioConfig& c = r.scenario;
    const std::vector<std::string> fields{to_string(c.method),
                                          c.design.to_string(),
                                          c.error.to_string(),
                                          std::to_string(c.n),
                                          std::to_string(c.p),
                                          std::to_string(c.s),
                                          format_double(c.h),
                                          format_double(c.alpha),
                                          std::to_string(c.reps),
                                          format_double(r.rejection_rate),
                                          format_double(r.std_error),
                                          std::to_string(r.failed_reps),
                                          std::to_string(c.seed),
                                          format_double(r.wall_time_seconds)};
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << "\r\n";
  }
  return out.str();
}

std::string curve_data(const PowerCurve& curve) {
  std::vector<std::pair<double, double>> rows;
  for (const ExperimentResult& r : curve.points) rows.emplace_back(r.scenario.h, r.rejection_rate);
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto& [h, rate] : rows) out += format_double(h) + " " + format_double(rate) + "\n";
  return out;
}

std::string manifest_json(const ReportBundle& bundle) {
  json j;
  j["software"] = {{"name", kSoftwareName}, {"version", kSoftwareVersion}};
  j["name"] = bundle.name;
  j["results"] = json::array();
  for (const auto& r : bundle.results) j["results"].push_back(result_json(r));
  j["curves"] = json::array();
  for (const auto& c : bundle.curves) {
    json cj{{"scenario_base", scenario_json(c.scenario_base)}, {"h_grid", c.h_grid}, {"points", json::array()}};
    for (const auto& r : c.points) cj["points"].push_back(result_json(r));
    j["curves"].push_back(cj);
  }
  return j.dump(2) + "\n";
}

ReportBundle parse_manifest(const std::string& text) {
  ReportBundle b;
  try {
    const json j = json::parse(text);
    b.name = j.at("name").get<std::string>();
    for (const auto& r : j.at("results")) b.results.push_back(result_from_json(r));
    for (const auto& cj : j.at("curves")) {
      PowerCurve c;
      c.scenario_base = scenario_from_json(cj.at("scenario_base"));
      c.h_grid = cj.at("h_grid").get<std::vector<double>>();
      for (const auto& r : cj.at("points")) c.points.push_back(result_from_json(r));
      b.curves.push_back(c);
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  } catch (const ParameterError& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  return b;
}

ReportBundle load_manifest(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / "manifest.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

void emit_report(const ReportBundle& bundle, const std::string& out_dir) {
  if (bundle.results.empty() && bundle.curves.empty()) throw ParameterError("emit_report: nothing to report");
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory '" + out_dir + "'");

  if (!bundle.results.empty()) write_file(dir / (bundle.name + ".csv"), results_csv(bundle.results));
  if (!bundle.curves.empty()) {
    std::vector<ExperimentResult> points;
    for (std::size_t i = 0; i < bundle.curves.size(); ++i) {
      const PowerCurve& c = bundle.curves[i];
      points.insert(points.end(), c.points.begin(), c.points.end());
      write_file(dir / (bundle.name + "_curve" + std::to_string(i + 1) + ".dat"), curve_data(c));
    }
    write_file(dir / (bundle.name + "_power.csv"), results_csv(points));
  }
  write_file(dir / "manifest.json", manifest_json(bundle));
}

}  // namespace nsinfer

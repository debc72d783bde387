// SPDX-License-Identifier: Apache-2.0
#include "beampred/report.hpp"

#include <beampred/error.hpp>

#include <nlohmann/json.hpp>

#include <charconv>
#include <sstream>
#include <string>

namespace beampred {

namespace {

using nlohmann::ordered_json;

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

ordered_json k_map(const std::map<std::size_t, double>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = v;
  return j;
}

std::map<std::size_t, double> k_map_from(const ordered_json& j) {
  std::map<std::size_t, double> m;
  for (const auto& [key, value] : j.items()) m[std::stoul(key)] = value.get<double>();
  return m;
}

ordered_json to_json(const EvalReport& r) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["feature_set"] = r.feature_set;
  j["q"] = r.q;
  j["n_test"] = r.n_test;
  j["config_hash"] = r.config_hash;
  j["master_seed"] = r.master_seed;
  j["topk_accuracy"] = k_map(r.topk_accuracy);
  j["overhead_ratio"] = k_map(r.overhead_ratio);
  ordered_json strata = ordered_json::array();
  for (const auto& s : r.strata) {
    ordered_json js;
    js["dimension"] = stratum_dimension_name(s.dimension);
    js["fallback"] = s.fallback;
    ordered_json bins = ordered_json::array();
    for (const auto& b : s.bins) {
      ordered_json jb;
      jb["name"] = b.name;
      jb["lower"] = b.lower;
      jb["upper"] = b.upper;
      jb["count"] = b.count;
      jb["topk_accuracy"] = k_map(b.topk);
      bins.push_back(std::move(jb));
    }
    js["bins"] = std::move(bins);
    strata.push_back(std::move(js));
  }
  j["strata"] = std::move(strata);
  return j;
}

EvalReport from_json(const ordered_json& j) {
  if (j.value("schema", "") != kReportSchema)
    throw DataError("report: unsupported schema '" + j.value("schema", "") + "'");
  EvalReport r;
  r.feature_set = j.at("feature_set").get<std::string>();
  r.q = j.at("q").get<std::size_t>();
  r.n_test = j.at("n_test").get<std::size_t>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.master_seed = j.at("master_seed").get<std::uint64_t>();
  r.topk_accuracy = k_map_from(j.at("topk_accuracy"));
  r.overhead_ratio = k_map_from(j.at("overhead_ratio"));
  for (const auto& js : j.at("strata")) {
    StratifiedReport s;
    s.dimension = parse_stratum_dimension(js.at("dimension").get<std::string>());
    s.fallback = js.at("fallback").get<bool>();
    for (const auto& jb : js.at("bins")) {
      StratumBin b;
      b.name = jb.at("name").get<std::string>();
      b.lower = jb.at("lower").get<double>();
      b.upper = jb.at("upper").get<double>();
      b.count = jb.at("count").get<std::size_t>();
      b.topk = k_map_from(jb.at("topk_accuracy"));
      s.bins.push_back(std::move(b));
    }
    r.strata.push_back(std::move(s));
  }
  return r;
}

ordered_json parse(std::string_view text) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
}

}  // namespace

std::string report_to_json(const EvalReport& report) { return to_json(report).dump(2) + "\n"; }

EvalReport report_from_json(std::string_view text) {
  try {
    return from_json(parse(text));
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
}

std::string reports_to_json(std::span<const EvalReport> reports) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["reports"] = ordered_json::array();
  for (const auto& r : reports) j["reports"].push_back(to_json(r));
  return j.dump(2) + "\n";
}

std::vector<EvalReport> reports_from_json(std::string_view text) {
  try {
    const auto j = parse(text);
    std::vector<EvalReport> out;
    for (const auto& r : j.at("reports")) out.push_back(from_json(r));
    return out;
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
}

std::string reports_to_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "# " << kReportSchema << '\n';
  out << "feature_set,dimension,stratum,lower,upper,count,k,accuracy,overhead_ratio,config_hash,"
         "master_seed\n";
  for (const auto& r : reports) {
    const auto tail = [&](std::size_t k) {
      const auto it = r.overhead_ratio.find(k);
      return (it == r.overhead_ratio.end() ? std::string() : num(it->second)) + ',' +
             r.config_hash + ',' + std::to_string(r.master_seed);
    };
    for (const auto& [k, acc] : r.topk_accuracy)
      out << r.feature_set << ",overall,all,,," << r.n_test << ',' << k << ',' << num(acc) << ','
          << tail(k) << '\n';
    for (const auto& s : r.strata) {
      for (const auto& b : s.bins) {
        for (const auto& [k, acc] : b.topk)
          out << r.feature_set << ',' << stratum_dimension_name(s.dimension) << ',' << b.name
              << ',' << num(b.lower) << ',' << num(b.upper) << ',' << b.count << ',' << k << ','
              << num(acc) << ',' << tail(k) << '\n';
      }
    }
  }
  return out.str();
}

std::string history_to_csv(std::span<const EpochRecord> history, std::string_view config_hash,
                           std::uint64_t master_seed) {
  std::ostringstream out;
  out << "# config_hash=" << config_hash << " master_seed=" << master_seed << '\n';
  out << "epoch,learning_rate,loss,top1\n";
  for (const auto& h : history)
    out << h.epoch << ',' << num(h.learning_rate) << ',' << num(h.loss) << ',' << num(h.top1)
        << '\n';
  return out.str();
}

}  // namespace beampred

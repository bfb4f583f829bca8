#include "freeway/harness/metrics.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "freeway/errors.hpp"

namespace freeway::harness {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double field_double(std::istringstream& in, const std::string& where) {
  std::string tok;
  if (!std::getline(in, tok, ','))
    throw InvalidInput(where + ": missing column");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
    throw InvalidInput(where + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

std::string metrics_csv_header() {
  return "episode,steps,cum_reward,norm_reward,disc_return,mean_speed,distance,"
         "mean_td_error,mean_loss,collision,epsilon\n";
}

std::string metrics_csv_row(const MetricsRecord& r) {
  std::ostringstream out;
  out << r.episode << ',' << r.steps << ',' << fmt_double(r.cum_reward) << ','
      << fmt_double(r.norm_reward) << ',' << fmt_double(r.disc_return) << ','
      << fmt_double(r.mean_speed) << ',' << fmt_double(r.distance) << ','
      << fmt_double(r.mean_td_error) << ',' << fmt_double(r.mean_loss) << ','
      << (r.collision ? 1 : 0) << ',' << fmt_double(r.epsilon) << '\n';
  return out.str();
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open metrics file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line + "\n" != metrics_csv_header())
    throw InvalidInput("'" + path + "' is not a metrics CSV");
  std::vector<MetricsRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::istringstream row(line);
    MetricsRecord r;
    r.episode = static_cast<int>(field_double(row, where));
    r.steps = static_cast<int>(field_double(row, where));
    r.cum_reward = field_double(row, where);
    r.norm_reward = field_double(row, where);
    r.disc_return = field_double(row, where);
    r.mean_speed = field_double(row, where);
    r.distance = field_double(row, where);
    r.mean_td_error = field_double(row, where);
    r.mean_loss = field_double(row, where);
    r.collision = field_double(row, where) != 0.0;
    r.epsilon = field_double(row, where);
    records.push_back(r);
  }
  return records;
}

std::string actions_csv_header() {
  return "episode,step,action_index,reward,ego_speed,ego_lane\n";
}

std::string actions_csv_row(const ActionLogRow& r) {
  std::ostringstream out;
  out << r.episode << ',' << r.step << ',' << r.action_index << ',' << fmt_double(r.reward) << ','
      << fmt_double(r.ego_speed) << ',' << r.ego_lane << '\n';
  return out.str();
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidInput("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Quartiles quartiles(const std::vector<double>& values) {
  Quartiles q;
  q.min = quantile(values, 0.0);
  q.q1 = quantile(values, 0.25);
  q.median = quantile(values, 0.5);
  q.q3 = quantile(values, 0.75);
  q.max = quantile(values, 1.0);
  return q;
}

}  // namespace freeway::harness

#pragma once

#include <string>
#include <vector>

namespace freeway::harness {

// One episode's measurements; one CSV row.
struct MetricsRecord {
  int episode = 0;
  int steps = 0;
  double cum_reward = 0.0;
  double norm_reward = 0.0;   // cum_reward / 100
  double disc_return = 0.0;   // sum of gamma^t r_t
  double mean_speed = 0.0;    // m/s over policy steps
  double distance = 0.0;      // m, ego odometer
  double mean_td_error = 0.0; // mean |delta| over the episode's train steps
  double mean_loss = 0.0;
  bool collision = false;
  double epsilon = 0.0;       // at episode end
};

struct ActionLogRow {
  int episode = 0;
  int step = 0;
  int action_index = 0;
  double reward = 0.0;
  double ego_speed = 0.0;
  int ego_lane = 0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& r);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

std::string actions_csv_header();
std::string actions_csv_row(const ActionLogRow& r);

// Boxplot statistics of one metric column.
struct Quartiles {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Linear-interpolation quantile of a copy of `values` (empty input rejected).
double quantile(std::vector<double> values, double p);
Quartiles quartiles(const std::vector<double>& values);

}  // namespace freeway::harness

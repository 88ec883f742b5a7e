/*
 * Copyright 2026 The attest authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "attest/services.hpp"

namespace attest::bench {

struct BenchConfig {
  double duration_s = 30.0;
  bool attested = false;
  std::uint64_t seed = 1;
};

struct BenchReport {
  BenchConfig config;
  double mean_latency_ms = 0.0;
  double latency_stderr_ms = 0.0;  // standard error of the mean
  double p50_ms = 0.0;
  double p99_ms = 0.0;
  std::uint64_t messages = 0;  // completed request/response pairs
  double kilobytes = 0.0;      // wire bytes both ways, prefixes included, / 1000
  std::vector<double> samples;  // per-RPC latency, ms, in completion order
};

/// Results of the original evaluation of this protocol stack, kept for
/// context when reporting measured overhead. Absolute numbers are
/// hardware-bound and not reproduction targets.
struct ReferenceResults {
  double unattested_latency_ms;
  double attested_latency_ms;
  std::uint64_t unattested_messages;
  std::uint64_t attested_messages;
  double unattested_kilobytes;
  double attested_kilobytes;
};

inline constexpr ReferenceResults reference_results{0.1452, 0.1903, 191250, 145054,
                                                    3060.0, 2321.0};

/// Nearest-rank percentile: the element at 1-based rank ceil(p/100 * n)
/// of the ascending-sorted samples.
inline double percentile_nearest_rank(const std::vector<double>& sorted, double p) {
  std::size_t n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

/// Assembles report statistics from raw samples and the byte count.
inline BenchReport report_from_samples(const BenchConfig& config, std::vector<double> samples,
                                       std::uint64_t wire_bytes) {
  if (samples.empty()) throw std::runtime_error("bench completed zero requests");
  BenchReport report;
  report.config = config;
  report.samples = std::move(samples);
  report.messages = report.samples.size();
  report.kilobytes = static_cast<double>(wire_bytes) / 1000.0;

  double n = static_cast<double>(report.samples.size());
  double sum = 0.0;
  for (double s : report.samples) sum += s;
  report.mean_latency_ms = sum / n;
  if (report.samples.size() > 1) {
    double sq = 0.0;
    for (double s : report.samples) {
      double d = s - report.mean_latency_ms;
      sq += d * d;
    }
    report.latency_stderr_ms = std::sqrt(sq / (n - 1.0)) / std::sqrt(n);
  }

  std::vector<double> sorted = report.samples;
  std::sort(sorted.begin(), sorted.end());
  report.p50_ms = percentile_nearest_rank(sorted, 50.0);
  report.p99_ms = percentile_nearest_rank(sorted, 99.0);
  return report;
}

/**
 * Runs the closed-loop latency benchmark: boots driver, controller and
 * (when attested) the proxy on loopback, then issues seeded random
 * requests one at a time until the wall-clock budget elapses (at least
 * one request). Throws std::runtime_error on startup or transport
 * failure.
 */
inline BenchReport run_bench(const BenchConfig& config) {
  sim::Bays initial;  // empty warehouse
  sim::DriverService driver(initial);
  std::optional<sim::ProxyService> proxy;
  std::uint16_t driver_target = driver.port();
  if (config.attested) {
    proxy.emplace(sim::HbwState::sigma(initial, std::nullopt), driver.port());
    driver_target = proxy->driver_side_port();
  }
  sim::ControllerService controller(initial, driver_target);
  if (proxy) proxy->set_controller_port(controller.port());

  auto sock = wire::Socket::connect_loopback(proxy ? proxy->port() : controller.port());
  if (!sock) throw std::runtime_error("bench: cannot connect to the front service");

  std::mt19937_64 rng(config.seed);
  std::vector<double> samples;
  std::uint64_t id = 0;
  auto bench_start = std::chrono::steady_clock::now();
  do {
    sim::Input input = sim::nth_request(rng);
    wire::WireMessage req = wire::WireMessage::request(++id, sim::method_name(input),
                                                       {hbw::to_string(input.color)});
    auto started = std::chrono::steady_clock::now();
    auto reply = wire::call(*sock, req);
    auto finished = std::chrono::steady_clock::now();
    if (!reply) throw std::runtime_error("bench: transport failure");
    samples.push_back(std::chrono::duration<double, std::milli>(finished - started).count());
  } while (std::chrono::duration<double>(std::chrono::steady_clock::now() - bench_start).count() <
           config.duration_s);

  std::uint64_t wire_bytes = sock->bytes_sent() + sock->bytes_received();
  sock->close();
  if (proxy) proxy->stop();
  controller.stop();
  driver.stop();
  return report_from_samples(config, std::move(samples), wire_bytes);
}

/// Plain decimal text for CSV/console output; always carries a decimal
/// point so step-function tools treat the column as real-valued.
inline std::string format_number(double value) {
  std::ostringstream os;
  os << std::setprecision(9) << value;
  std::string s = os.str();
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

/**
 * Writes the latency CDF as CSV: header `latency_ms,cumulative_fraction`,
 * one row per sample sorted ascending, fraction = rank/n (last row 1.0).
 */
inline void emit_cdf(const BenchReport& report, const std::filesystem::path& path) {
  if (report.samples.empty()) throw std::invalid_argument("emit_cdf: report has no samples");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_cdf: cannot write '" + path.string() + "'");
  std::vector<double> sorted = report.samples;
  std::sort(sorted.begin(), sorted.end());
  out << "latency_ms,cumulative_fraction\n";
  double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out << format_number(sorted[i]) << ',' << format_number(static_cast<double>(i + 1) / n)
        << '\n';
  }
  if (!out.flush()) throw std::runtime_error("emit_cdf: write to '" + path.string() + "' failed");
}

inline nlohmann::json to_json(const BenchReport& report) {
  nlohmann::json j;
  j["config"] = {{"attested", report.config.attested},
                 {"duration", report.config.duration_s},
                 {"seed", report.config.seed}};
  j["mean_latency_ms"] = report.mean_latency_ms;
  j["latency_stderr_ms"] = report.latency_stderr_ms;
  j["p50_ms"] = report.p50_ms;
  j["p99_ms"] = report.p99_ms;
  j["messages"] = report.messages;
  j["kilobytes"] = report.kilobytes;
  j["samples"] = report.samples;
  return j;
}

}  // namespace attest::bench

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

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "attest/bench.hpp"
#include "attest/schema.hpp"
#include "attest/trace.hpp"
#include "attest/verify.hpp"

namespace {

int cmd_verify(unsigned workers) {
  auto report = attest::hbw::check_safety(attest::hbw::hbw_spec(), workers);
  std::printf("%" PRIu64 " states, %zu violations\n", report.states_checked,
              report.violations.size());
  std::printf("elapsed: %.2fs\n", report.elapsed.count());
  std::size_t shown = 0;
  for (const auto& v : report.violations) {
    if (++shown > 5) {
      std::printf("... and %zu more\n", report.violations.size() - 5);
      break;
    }
    std::printf("violation at state %" PRIu64 ": %s\n", v.index,
                attest::hbw::to_string(v.state).c_str());
  }
  return report.safe() ? 0 : 1;
}

int cmd_decide(const std::string& path) {
  auto parsed = attest::hbw::load_trace_file(path);
  if (!parsed.ok()) {
    if (parsed.error->line > 0) {
      std::fprintf(stderr, "parse error: line %zu: %s\n", parsed.error->line,
                   parsed.error->message.c_str());
    } else {
      std::fprintf(stderr, "parse error: %s\n", parsed.error->message.c_str());
    }
    return 2;
  }
  auto check = attest::hbw::check_trace(parsed.events);
  if (check.conformant) {
    std::printf("conformant (%zu events)\n", parsed.events.size());
    return 0;
  }
  std::uint64_t position = check.offense->position;
  std::string line;
  if (position >= 1 && position <= parsed.lines.size()) {
    line = "line " + std::to_string(parsed.lines[position - 1]) + ": ";
  }
  std::string event_text;
  if (position >= 1 && position <= parsed.events.size()) {
    event_text = attest::hbw::format_trace({parsed.events[position - 1]});
    if (!event_text.empty() && event_text.back() == '\n') event_text.pop_back();
    event_text = "'" + event_text + "': ";
  }
  std::printf("nonconformant at event %" PRIu64 ": %s%s%s\n", position, line.c_str(),
              event_text.c_str(), check.offense->reason.c_str());
  return 1;
}

int cmd_gen_schema(bool builtin_hbw, const std::string& file,
                   const std::optional<std::string>& file_id) {
  attest::schema::InterfaceSpec spec;
  if (builtin_hbw) {
    spec = attest::schema::hbw_interface_spec();
  } else {
    auto parsed = attest::schema::load_interface_file(file);
    if (!parsed.ok()) {
      std::fprintf(stderr, "%s: %s\n", file.c_str(), parsed.error->to_string().c_str());
      return 2;
    }
    spec = std::move(*parsed.spec);
  }
  try {
    std::cout << attest::schema::gen_capnp(spec, file_id);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

int cmd_simulate(const attest::sim::SimConfig& cfg) {
  attest::sim::SimReport report;
  try {
    report = attest::sim::run_simulation(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simulate: %s\n", e.what());
    return 1;
  }
  std::printf("client: sent %" PRIu64 ", ok %" PRIu64 ", rejected %" PRIu64 "%s\n",
              report.client.sent, report.client.ok, report.client.rejected,
              report.client.aborted ? " (aborted)" : "");
  std::printf("driver: bays [%s], damaged %s\n", attest::hbw::to_string(report.driver.bays).c_str(),
              report.driver.damaged ? "yes" : "no");
  std::printf("mirror: bays [%s], %s\n", attest::hbw::to_string(report.mirror).c_str(),
              report.mirror_divergence ? "DIVERGED from driver" : "matches driver");
  if (report.gate) {
    std::printf("attestation: halted %s, rejected events %" PRIu64 "\n",
                report.gate->halted ? "yes" : "no", report.gate->rejected);
    if (report.gate->offense) {
      const auto& offense = *report.gate->offense;
      std::string cmd = offense.cmd ? attest::hbw::to_string(*offense.cmd) + ": " : std::string();
      std::printf("offense: event %" PRIu64 ": %s%s\n", offense.position, cmd.c_str(),
                  offense.reason.c_str());
    }
  }
  if (report.client.aborted) return 1;
  return report.driver.damaged ? 1 : 0;
}

void print_bench_report(const char* label, const attest::bench::BenchReport& report) {
  std::printf("%s mean %.4f ms (stderr %.4f), p50 %.4f ms, p99 %.4f ms, %" PRIu64
              " messages, %.1f KB\n",
              label, report.mean_latency_ms, report.latency_stderr_ms, report.p50_ms,
              report.p99_ms, report.messages, report.kilobytes);
}

std::filesystem::path derived_path(const std::filesystem::path& base, const char* tag) {
  std::filesystem::path out = base;
  std::filesystem::path ext = out.extension();
  out.replace_extension();
  out += std::string("_") + tag;
  out += ext;
  return out;
}

int cmd_bench(double duration, bool attested_only, std::uint64_t seed, const std::string& cdf,
              const std::string& json_path) {
  using attest::bench::BenchConfig;
  using attest::bench::BenchReport;
  using attest::bench::reference_results;

  try {
    if (attested_only) {
      BenchReport report = attest::bench::run_bench(BenchConfig{duration, true, seed});
      print_bench_report("attested:  ", report);
      if (!cdf.empty()) attest::bench::emit_cdf(report, cdf);
      if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << attest::bench::to_json(report).dump(2) << '\n';
      }
      return 0;
    }

    BenchReport unattested = attest::bench::run_bench(BenchConfig{duration, false, seed});
    BenchReport attested = attest::bench::run_bench(BenchConfig{duration, true, seed});
    print_bench_report("unattested:", unattested);
    print_bench_report("attested:  ", attested);

    double latency_overhead =
        (attested.mean_latency_ms - unattested.mean_latency_ms) / unattested.mean_latency_ms *
        100.0;
    double message_change = (static_cast<double>(attested.messages) -
                             static_cast<double>(unattested.messages)) /
                            static_cast<double>(unattested.messages) * 100.0;
    std::printf("measured overhead: %+.1f%% mean latency, %+.1f%% messages\n", latency_overhead,
                message_change);

    double ref_latency = (reference_results.attested_latency_ms -
                          reference_results.unattested_latency_ms) /
                         reference_results.unattested_latency_ms * 100.0;
    double ref_messages = (static_cast<double>(reference_results.attested_messages) -
                           static_cast<double>(reference_results.unattested_messages)) /
                          static_cast<double>(reference_results.unattested_messages) * 100.0;
    std::printf("reference results: %.4f ms -> %.4f ms (%+.1f%% latency), %" PRIu64 " -> %" PRIu64
                " messages (%+.1f%%)\n",
                reference_results.unattested_latency_ms, reference_results.attested_latency_ms,
                ref_latency, reference_results.unattested_messages,
                reference_results.attested_messages, ref_messages);

    if (!cdf.empty()) {
      attest::bench::emit_cdf(unattested, derived_path(cdf, "unattested"));
      attest::bench::emit_cdf(attested, derived_path(cdf, "attested"));
    }
    if (!json_path.empty()) {
      nlohmann::json j;
      j["unattested"] = attest::bench::to_json(unattested);
      j["attested"] = attest::bench::to_json(attested);
      j["measured_latency_overhead_percent"] = latency_overhead;
      std::ofstream out(json_path);
      out << j.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bench: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Protocol attestation toolkit for the high-bay-warehouse RPC protocol"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "Exhaustively check the safety condition");
  unsigned workers = 0;
  verify->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");

  // decide
  auto* decide = app.add_subcommand("decide", "Check a recorded trace file for conformance");
  std::string trace_file;
  std::string protocol = "hbw";
  decide->add_option("trace", trace_file, "Trace file")->required();
  decide->add_option("--protocol", protocol, "Protocol instance")
      ->check(CLI::IsMember({"hbw"}));

  // gen-schema
  auto* gen = app.add_subcommand("gen-schema", "Emit RPC-framework schema text");
  bool builtin_hbw = false;
  std::string iface_file;
  std::string file_id;
  gen->add_flag("--hbw", builtin_hbw, "Use the built-in warehouse interface");
  gen->add_option("file", iface_file, "Interface description file");
  gen->add_option("--file-id", file_id, "Prepend a @0x<hex> file ID line");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the networked warehouse simulation");
  attest::sim::SimConfig sim_cfg;
  int compromised = 0;
  simulate->add_option("--requests", sim_cfg.requests, "Number of client requests");
  simulate->add_option("--seed", sim_cfg.seed, "Client RNG seed");
  simulate->add_flag("--attested", sim_cfg.attested, "Route traffic through the attestation proxy");
  simulate->add_option("--compromised", compromised, "Attack pattern (1..5)")
      ->check(CLI::Range(1, 5));
  simulate->add_option("--driver", sim_cfg.driver_port, "Driver port (0 = ephemeral)");
  simulate->add_option("--controller", sim_cfg.controller_port, "Controller port");
  simulate->add_option("--proxy", sim_cfg.proxy_port, "Proxy client-facing port");
  simulate->add_option("--proxy-driver", sim_cfg.proxy_driver_port,
                       "Proxy driver-interposition port");

  // bench
  auto* bench = app.add_subcommand("bench", "Measure RPC latency and throughput");
  double duration = 30.0;
  bool bench_attested = false;
  std::uint64_t bench_seed = 1;
  std::string cdf_path;
  std::string json_path;
  bench->add_option("--duration", duration, "Seconds per configuration")
      ->check(CLI::NonNegativeNumber);
  bench->add_flag("--attested", bench_attested,
                  "Benchmark only the attested configuration (default: both)");
  bench->add_option("--seed", bench_seed, "Request stream seed");
  bench->add_option("--cdf", cdf_path, "Write latency CDF CSV(s) to this path");
  bench->add_option("--json", json_path, "Write the report as JSON to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (verify->parsed()) return cmd_verify(workers);
  if (decide->parsed()) return cmd_decide(trace_file);
  if (gen->parsed()) {
    if (builtin_hbw == !iface_file.empty()) {
      std::fprintf(stderr, "gen-schema: pass exactly one of --hbw or an interface file\n");
      return 2;
    }
    std::optional<std::string> id;
    if (!file_id.empty()) id = file_id;
    return cmd_gen_schema(builtin_hbw, iface_file, id);
  }
  if (simulate->parsed()) {
    if (compromised != 0) sim_cfg.compromised = compromised;
    return cmd_simulate(sim_cfg);
  }
  if (bench->parsed()) return cmd_bench(duration, bench_attested, bench_seed, cdf_path, json_path);
  return 2;
}

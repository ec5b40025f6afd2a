// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#include "rrdps/session.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rrdps/errors.hpp"
#include "rrdps/security.hpp"

namespace rrdps::session {

namespace {

constexpr std::uint64_t kAliceSalt = 0xA11CE;
constexpr std::uint64_t kBobSalt = 0xB0B;
constexpr std::uint64_t kDetectorSalt = 0xDE7EC7;
constexpr std::uint64_t kDriftSalt = 0xD21F7;
constexpr std::uint64_t kCalibSalt = 0xCA11B;

double parse_f64(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string text(value);
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + std::string(key) + ": " +
                      std::string(value));
  }
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("bad integer value for " + std::string(key) + ": " +
                      std::string(value));
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  const std::uint64_t v = parse_u64(key, value);
  if (v > 1'000'000) {
    throw ConfigError("value for " + std::string(key) + " out of range");
  }
  return static_cast<int>(v);
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw ConfigError("bad boolean value for " + std::string(key) + ": " +
                    std::string(value));
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_u64(const std::vector<std::uint64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<std::uint64_t> split_u64(std::string_view key,
                                     std::string_view text) {
  std::vector<std::uint64_t> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                           : comma - start);
    out.push_back(parse_u64(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Observables {
  double gain = 0.0;
  double bit_error = 0.0;
};

photonics::ChannelModel make_channel(const RunConfig& cfg) {
  photonics::ChannelModel channel;
  channel.total_loss_db = cfg.total_loss_db;
  channel.excess_loss_db = cfg.excess_loss_db;
  channel.detection_efficiency = cfg.detection_efficiency;
  channel.dark_rate_cps = cfg.dark_rate_cps;
  return channel;
}

std::vector<double> delay_table(const std::vector<double>& per_delay,
                                double scalar, int length) {
  if (!per_delay.empty()) return per_delay;
  return std::vector<double>(static_cast<std::size_t>(length), scalar);
}

std::uint64_t resolve_rounds(const RunConfig& cfg, const SchedulePlan& plan) {
  if (cfg.total_rounds > 0) return cfg.total_rounds;
  if (cfg.duration_s > 0.0) {
    return static_cast<std::uint64_t>(
        std::floor(cfg.duration_s *
                       static_cast<double>(plan.rounds_per_second) +
                   1e-9));
  }
  return 0;
}

void fill_security(SessionReport& report, const security::SecurityParams& params,
                   const SchedulePlan& plan, std::uint64_t rounds) {
  security::RateBreakdown breakdown;
  try {
    breakdown = security::key_rate(
        params, static_cast<double>(plan.rounds_per_second));
  } catch (const std::domain_error& err) {
    throw InfeasibleSecurityError(err.what());
  }
  report.gain = params.gain;
  report.bit_error = params.bit_error;
  report.threshold_photons = breakdown.threshold_photons;
  report.pa_cost = breakdown.pa_cost;
  report.ec_cost = breakdown.ec_cost;
  report.rate_per_round = breakdown.rate_per_round;
  report.insecure = breakdown.insecure;
  report.final_key_bits =
      security::final_key_length(breakdown.rate_per_round, rounds);
  report.duration_s =
      plan.rounds_per_second > 0
          ? static_cast<double>(rounds) /
                static_cast<double>(plan.rounds_per_second)
          : 0.0;
  report.rate_bps = report.duration_s > 0.0
                        ? static_cast<double>(report.final_key_bits) /
                              report.duration_s
                        : breakdown.rate_bps;
}

}  // namespace

RunMode parse_mode(std::string_view name) {
  if (name == "analytic") return RunMode::kAnalytic;
  if (name == "montecarlo") return RunMode::kMonteCarlo;
  if (name == "paper-repro") return RunMode::kPaperRepro;
  throw ConfigError("unknown mode: " + std::string(name));
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kAnalytic: return "analytic";
    case RunMode::kMonteCarlo: return "montecarlo";
    case RunMode::kPaperRepro: return "paper-repro";
  }
  throw std::logic_error("unreachable");
}

void RunConfig::validate() const {
  if (train_length < 2 || train_length > 128) {
    throw ConfigError("train-length must lie in [2, 128] (7-bit gate word)");
  }
  if (!(mean_photons > 0.0)) throw ConfigError("mean-photons must be > 0");
  if (total_loss_db < 0.0 || excess_loss_db < 0.0) {
    throw ConfigError("loss values must be >= 0 dB");
  }
  if (!(detection_efficiency >= 0.0 && detection_efficiency <= 1.0)) {
    throw ConfigError("detection-efficiency must lie in [0, 1]");
  }
  if (dark_rate_cps < 0.0) throw ConfigError("dark-rate-cps must be >= 0");
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw ConfigError("visibility must lie in [0, 1]");
  }
  const auto length = static_cast<std::size_t>(train_length);
  if (!visibility_by_delay.empty()) {
    if (visibility_by_delay.size() != length) {
      throw ConfigError("visibility table must cover every delay");
    }
    for (double v : visibility_by_delay) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("visibility table entries must lie in [0, 1]");
      }
    }
  }
  if (!offset_by_delay.empty() && offset_by_delay.size() != length) {
    throw ConfigError("offset table must cover every delay");
  }
  if (duration_s < 0.0) throw ConfigError("duration-s must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (drift.sigma_rad_per_sqrt_s < 0.0) {
    throw ConfigError("drift-sigma must be >= 0");
  }
  if (lockin.flux_cps < 0.0) throw ConfigError("lockin-flux-cps must be >= 0");
  if (!(lockin.detection_efficiency >= 0.0 &&
        lockin.detection_efficiency <= 1.0)) {
    throw ConfigError("lockin-efficiency must lie in [0, 1]");
  }
  if (!(lockin.visibility >= 0.0 && lockin.visibility <= 1.0)) {
    throw ConfigError("lockin-visibility must lie in [0, 1]");
  }
  schedule(*this);  // window/rate consistency
}

SchedulePlan schedule(const RunConfig& config) {
  if (!(config.round_rate_hz > 0.0)) {
    throw ConfigError("round-rate-hz must be > 0");
  }
  if (config.locking_window_ms < 0.0 || config.qkd_window_ms < 0.0 ||
      config.settle_us < 0.0) {
    throw ConfigError("window and settle times must be >= 0");
  }
  if (std::abs(config.locking_window_ms + config.qkd_window_ms - 1000.0) >
      1e-9) {
    throw ConfigError("locking and QKD windows must sum to 1000 ms");
  }
  SchedulePlan plan;
  plan.locking_window_s = config.locking_window_ms * 1e-3;
  plan.qkd_window_s = config.qkd_window_ms * 1e-3;
  plan.round_period_s = 1.0 / config.round_rate_hz;
  plan.settle_s = config.settle_us * 1e-6;
  if (plan.settle_s >= plan.round_period_s) {
    throw ConfigError("settle time must fit inside the round period");
  }
  plan.rounds_per_second = static_cast<std::uint64_t>(std::floor(
      config.qkd_window_ms * config.round_rate_hz / 1000.0 + 1e-9));
  plan.qkd_busy_s =
      static_cast<double>(plan.rounds_per_second) * plan.round_period_s;
  plan.idle_s = 1.0 - plan.locking_window_s - plan.qkd_busy_s;
  return plan;
}

SessionReport run_analytic(const RunConfig& config) {
  config.validate();
  if (config.mode == RunMode::kMonteCarlo) {
    throw ConfigError("analytic runner cannot execute montecarlo mode");
  }
  const SchedulePlan plan = schedule(config);
  const std::uint64_t rounds = resolve_rounds(config, plan);
  const int length = config.train_length;

  SessionReport report;
  report.mode = mode_name(config.mode);
  report.seed = config.seed;
  report.train_length = length;
  report.mean_photons = config.mean_photons;
  report.rounds_sent = rounds;
  report.sifted_by_delay.assign(static_cast<std::size_t>(length), 0);
  report.errors_by_delay.assign(static_cast<std::size_t>(length), 0);

  const bool have_gain = config.gain_override >= 0.0 ||
                         config.sifted_override > 0;
  const bool have_ebit = config.bit_error_override >= 0.0;
  if (config.mode == RunMode::kPaperRepro) {
    if (!have_gain || !have_ebit) {
      throw ConfigError(
          "paper-repro mode needs gain (or sifted-count) and bit-error");
    }
    if (rounds == 0) {
      throw ConfigError("paper-repro mode needs total-rounds or duration-s");
    }
  }
  if (config.gain_override >= 0.0 && config.sifted_override > 0) {
    throw ConfigError("give either gain or sifted-count, not both");
  }

  photonics::AnalyticRates rates;
  bool derived = false;
  if (!have_gain || !have_ebit) {
    const auto vis =
        delay_table(config.visibility_by_delay, config.visibility, length);
    const auto off =
        delay_table(config.offset_by_delay, config.phase_offset_rad, length);
    rates = photonics::analytic_gain_and_error(length, config.mean_photons,
                                               make_channel(config), vis, off);
    derived = true;
  }

  Observables obs;
  if (config.sifted_override > 0) {
    if (rounds == 0) throw ConfigError("sifted-count needs a round count");
    obs.gain = static_cast<double>(config.sifted_override) /
               static_cast<double>(rounds);
    report.sifted_count = config.sifted_override;
  } else if (config.gain_override >= 0.0) {
    obs.gain = config.gain_override;
    report.sifted_count = static_cast<std::uint64_t>(
        std::llround(obs.gain * static_cast<double>(rounds)));
  } else {
    obs.gain = rates.gain;
    report.sifted_count = static_cast<std::uint64_t>(
        std::llround(obs.gain * static_cast<double>(rounds)));
  }
  obs.bit_error = have_ebit ? config.bit_error_override : rates.error_rate;

  if (derived && !have_gain) {
    // Expected per-delay tallies for the would-be session.
    const double per_delay_rounds =
        static_cast<double>(rounds) / static_cast<double>(length - 1);
    for (int d = 1; d < length; ++d) {
      const double sifted =
          per_delay_rounds * rates.gain_by_delay[static_cast<std::size_t>(d)];
      const double errors =
          sifted * rates.error_by_delay[static_cast<std::size_t>(d)];
      report.sifted_by_delay[static_cast<std::size_t>(d)] =
          static_cast<std::uint64_t>(std::llround(sifted));
      report.errors_by_delay[static_cast<std::size_t>(d)] =
          static_cast<std::uint64_t>(std::llround(errors));
    }
  }

  security::SecurityParams params{length, config.mean_photons, obs.gain,
                                  obs.bit_error};
  fill_security(report, params, plan, rounds);
  return report;
}

namespace {

struct RoundContext {
  const RunConfig* config = nullptr;
  const photonics::ChannelModel* channel = nullptr;
  const std::vector<double>* visibility = nullptr;
  const std::vector<double>* offsets = nullptr;  // effective, per window
  double transmittance = 1.0;
  bool keep_sifted = false;
  bool keep_clicks = false;
};

struct ShardResult {
  explicit ShardResult(int length) : ledger(length) {}
  protocol::SessionLedger ledger;
  std::vector<protocol::SiftedRecord> sifted;
  std::vector<photonics::ClickRecord> clicks;
};

void simulate_round(std::uint64_t round_id, const RoundContext& ctx,
                    ShardResult& out) {
  const RunConfig& cfg = *ctx.config;
  const int length = cfg.train_length;
  rng::BitStream alice_bits(rng::derive_seed(cfg.seed, round_id, kAliceSalt));
  rng::BitStream bob_bits(rng::derive_seed(cfg.seed, round_id, kBobSalt));
  rng::Engine engine(rng::derive_seed(cfg.seed, round_id, kDetectorSalt));

  const auto record = protocol::alice_encode(round_id, length, alice_bits);
  const auto train = photonics::apply_loss(
      photonics::build_train(record, cfg.mean_photons), ctx.transmittance);
  const auto choice = protocol::bob_choose_delay(length, bob_bits);
  const auto d = static_cast<std::size_t>(choice.delay);
  const auto intensities = photonics::interferometer_output(
      train, choice.delay, (*ctx.visibility)[d], (*ctx.offsets)[d]);
  auto clicks =
      photonics::sample_clicks(round_id, intensities, *ctx.channel, engine);

  out.ledger.record_round();
  const auto valid =
      photonics::extract_valid(clicks, choice.delay, length, engine);
  if (valid) {
    const auto detection = protocol::interpret_detection(
        valid->slot, valid->detector, choice, length);
    const auto announcement =
        protocol::make_announcement(round_id, *detection, choice, length);
    const auto alice_bit = protocol::sift(record, announcement);
    const protocol::SiftedRecord sifted{round_id,
                                        announcement.first,
                                        announcement.second,
                                        choice.delay,
                                        alice_bit,
                                        detection->bob_bit};
    out.ledger.record(sifted);
    if (ctx.keep_sifted) out.sifted.push_back(sifted);
  }
  if (ctx.keep_clicks) out.clicks.push_back(std::move(clicks));
}

}  // namespace

SessionReport run_montecarlo(const RunConfig& config, MonteCarloDumps* dumps) {
  config.validate();
  if (config.mode != RunMode::kMonteCarlo) {
    throw ConfigError("montecarlo runner needs mode=montecarlo");
  }
  const SchedulePlan plan = schedule(config);
  const std::uint64_t rounds_total = resolve_rounds(config, plan);
  if (rounds_total == 0) {
    throw ConfigError("montecarlo mode needs total-rounds or duration-s");
  }
  if (plan.rounds_per_second == 0) {
    throw ConfigError("QKD window yields zero rounds per second");
  }
  const int length = config.train_length;
  const photonics::ChannelModel channel = make_channel(config);
  const auto visibility =
      delay_table(config.visibility_by_delay, config.visibility, length);
  const auto static_offset =
      delay_table(config.offset_by_delay, config.phase_offset_rad, length);

  phaselock::DriftModel drift = config.drift;
  drift.num_delays = length;
  phaselock::PhaseTruth truth(drift,
                              rng::derive_seed(config.seed, kDriftSalt));
  phaselock::CalibrationTable table(length);
  phaselock::CalibrationSettings cal_settings;
  cal_settings.window_budget_s = plan.locking_window_s;

  RoundContext ctx;
  ctx.config = &config;
  ctx.channel = &channel;
  ctx.visibility = &visibility;
  ctx.transmittance = channel.transmittance();
  ctx.keep_sifted = dumps != nullptr;
  ctx.keep_clicks = dumps != nullptr && dumps->keep_clicks;

  protocol::SessionLedger ledger(length);
  std::vector<double> offsets(static_cast<std::size_t>(length), 0.0);
  ctx.offsets = &offsets;

  std::uint64_t done = 0;
  std::uint64_t second = 0;
  while (done < rounds_total) {
    truth.advance(plan.locking_window_s);
    if (config.phase_lock && plan.locking_window_s > 0.0) {
      rng::Engine cal_engine =
          rng::make_engine(config.seed, kCalibSalt, second);
      calibrate_all(table, truth, config.lockin, cal_settings, cal_engine);
    }
    truth.advance(plan.qkd_window_s);
    // Rounds in this window see the end-of-window truth, the conservative
    // choice for residual drift.
    for (int d = 1; d < length; ++d) {
      offsets[static_cast<std::size_t>(d)] =
          truth.phase(d) - table.compensation(d) +
          static_offset[static_cast<std::size_t>(d)];
    }
    const std::uint64_t window_rounds =
        std::min<std::uint64_t>(plan.rounds_per_second, rounds_total - done);

    const int threads =
        static_cast<int>(std::min<std::uint64_t>(
            static_cast<std::uint64_t>(config.threads), window_rounds));
    if (threads <= 1) {
      ShardResult shard(length);
      for (std::uint64_t r = 0; r < window_rounds; ++r) {
        simulate_round(done + r, ctx, shard);
      }
      ledger.merge(shard.ledger);
      if (dumps) {
        dumps->sifted.insert(dumps->sifted.end(), shard.sifted.begin(),
                             shard.sifted.end());
        dumps->clicks.insert(dumps->clicks.end(), shard.clicks.begin(),
                             shard.clicks.end());
      }
    } else {
      std::vector<ShardResult> shards;
      shards.reserve(static_cast<std::size_t>(threads));
      for (int t = 0; t < threads; ++t) shards.emplace_back(length);
      const std::uint64_t chunk =
          (window_rounds + static_cast<std::uint64_t>(threads) - 1) /
          static_cast<std::uint64_t>(threads);
      std::vector<std::thread> workers;
      for (int t = 0; t < threads; ++t) {
        const std::uint64_t begin = done + chunk * static_cast<std::uint64_t>(t);
        const std::uint64_t end =
            std::min(done + window_rounds,
                     begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, t, begin, end] {
          for (std::uint64_t r = begin; r < end; ++r) {
            simulate_round(r, ctx, shards[static_cast<std::size_t>(t)]);
          }
        });
      }
      for (auto& w : workers) w.join();
      for (auto& shard : shards) {
        ledger.merge(shard.ledger);
        if (dumps) {
          dumps->sifted.insert(dumps->sifted.end(), shard.sifted.begin(),
                               shard.sifted.end());
          dumps->clicks.insert(dumps->clicks.end(), shard.clicks.begin(),
                               shard.clicks.end());
        }
      }
    }
    done += window_rounds;
    ++second;
  }

  SessionReport report;
  report.mode = mode_name(config.mode);
  report.seed = config.seed;
  report.train_length = length;
  report.mean_photons = config.mean_photons;
  report.rounds_sent = ledger.rounds_sent();
  report.sifted_count = ledger.sifted_total();
  report.sifted_by_delay.assign(static_cast<std::size_t>(length), 0);
  report.errors_by_delay.assign(static_cast<std::size_t>(length), 0);
  for (int d = 1; d < length; ++d) {
    const auto& tally = ledger.tally(d);
    report.sifted_by_delay[static_cast<std::size_t>(d)] = tally.sifted;
    report.errors_by_delay[static_cast<std::size_t>(d)] = tally.errors;
  }
  security::SecurityParams params{length, config.mean_photons, ledger.gain(),
                                  ledger.mean_error_rate()};
  fill_security(report, params, plan, ledger.rounds_sent());
  return report;
}

void write_summary(const SessionReport& report, std::ostream& out) {
  out << "schema=" << report.schema << '\n'
      << "mode=" << report.mode << '\n'
      << "seed=" << report.seed << '\n'
      << "train-length=" << report.train_length << '\n'
      << "mean-photons=" << fmt_double(report.mean_photons) << '\n'
      << "rounds-sent=" << report.rounds_sent << '\n'
      << "sifted-count=" << report.sifted_count << '\n'
      << "gain=" << fmt_double(report.gain) << '\n'
      << "bit-error=" << fmt_double(report.bit_error) << '\n'
      << "threshold-photons=" << report.threshold_photons << '\n'
      << "pa-cost=" << fmt_double(report.pa_cost) << '\n'
      << "ec-cost=" << fmt_double(report.ec_cost) << '\n'
      << "rate-per-round=" << fmt_double(report.rate_per_round) << '\n'
      << "final-key-bits=" << report.final_key_bits << '\n'
      << "rate-bps=" << fmt_double(report.rate_bps) << '\n'
      << "duration-s=" << fmt_double(report.duration_s) << '\n'
      << "insecure=" << (report.insecure ? 1 : 0) << '\n'
      << "sifted-by-delay=" << join_u64(report.sifted_by_delay) << '\n'
      << "errors-by-delay=" << join_u64(report.errors_by_delay) << '\n';
}

std::string summary_string(const SessionReport& report) {
  std::ostringstream out;
  write_summary(report, out);
  return out.str();
}

SessionReport parse_summary(std::istream& in) {
  SessionReport report;
  report.schema.clear();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("summary: malformed line: " + line);
    }
    const std::string_view key = std::string_view(line).substr(0, eq);
    const std::string_view value = std::string_view(line).substr(eq + 1);
    if (key == "schema") {
      if (value != "rrdps-report/1") {
        throw std::runtime_error("summary: unsupported schema: " +
                                 std::string(value));
      }
      report.schema = std::string(value);
    } else if (key == "mode") {
      report.mode = std::string(value);
    } else if (key == "seed") {
      report.seed = parse_u64(key, value);
    } else if (key == "train-length") {
      report.train_length = parse_int(key, value);
    } else if (key == "mean-photons") {
      report.mean_photons = parse_f64(key, value);
    } else if (key == "rounds-sent") {
      report.rounds_sent = parse_u64(key, value);
    } else if (key == "sifted-count") {
      report.sifted_count = parse_u64(key, value);
    } else if (key == "gain") {
      report.gain = parse_f64(key, value);
    } else if (key == "bit-error") {
      report.bit_error = parse_f64(key, value);
    } else if (key == "threshold-photons") {
      report.threshold_photons = parse_int(key, value);
    } else if (key == "pa-cost") {
      report.pa_cost = parse_f64(key, value);
    } else if (key == "ec-cost") {
      report.ec_cost = parse_f64(key, value);
    } else if (key == "rate-per-round") {
      report.rate_per_round = parse_f64(key, value);
    } else if (key == "final-key-bits") {
      report.final_key_bits = parse_u64(key, value);
    } else if (key == "rate-bps") {
      report.rate_bps = parse_f64(key, value);
    } else if (key == "duration-s") {
      report.duration_s = parse_f64(key, value);
    } else if (key == "insecure") {
      report.insecure = parse_bool(key, value);
    } else if (key == "sifted-by-delay") {
      report.sifted_by_delay = split_u64(key, value);
    } else if (key == "errors-by-delay") {
      report.errors_by_delay = split_u64(key, value);
    } else {
      throw std::runtime_error("summary: unknown key: " + std::string(key));
    }
  }
  if (report.schema.empty()) {
    throw std::runtime_error("summary: missing schema line");
  }
  return report;
}

void write_delay_table(const SessionReport& report, std::ostream& out) {
  out << "d,sifted,errors,e_bit\n";
  for (int d = 1; d < report.train_length; ++d) {
    const auto sifted = report.sifted_by_delay[static_cast<std::size_t>(d)];
    const auto errors = report.errors_by_delay[static_cast<std::size_t>(d)];
    const double e_bit =
        sifted > 0 ? static_cast<double>(errors) / static_cast<double>(sifted)
                   : 0.0;
    out << d << ',' << sifted << ',' << errors << ',' << fmt_double(e_bit)
        << '\n';
  }
}

void apply_config_entry(RunConfig& config, std::string_view key,
                        std::string_view value) {
  if (key == "train-length") {
    config.train_length = parse_int(key, value);
  } else if (key == "mean-photons" || key == "mu") {
    config.mean_photons = parse_f64(key, value);
  } else if (key == "total-loss-db") {
    config.total_loss_db = parse_f64(key, value);
  } else if (key == "excess-loss-db") {
    config.excess_loss_db = parse_f64(key, value);
  } else if (key == "detection-efficiency") {
    config.detection_efficiency = parse_f64(key, value);
  } else if (key == "dark-rate-cps") {
    config.dark_rate_cps = parse_f64(key, value);
  } else if (key == "visibility") {
    config.visibility = parse_f64(key, value);
  } else if (key == "visibility-table") {
    load_visibility_table(config, std::string(value));
  } else if (key == "phase-offset-rad") {
    config.phase_offset_rad = parse_f64(key, value);
  } else if (key == "round-rate-hz") {
    config.round_rate_hz = parse_f64(key, value);
  } else if (key == "locking-window-ms") {
    config.locking_window_ms = parse_f64(key, value);
  } else if (key == "qkd-window-ms") {
    config.qkd_window_ms = parse_f64(key, value);
  } else if (key == "settle-us") {
    config.settle_us = parse_f64(key, value);
  } else if (key == "total-rounds") {
    config.total_rounds = parse_u64(key, value);
  } else if (key == "duration-s") {
    config.duration_s = parse_f64(key, value);
  } else if (key == "seed") {
    config.seed = parse_u64(key, value);
  } else if (key == "mode") {
    config.mode = parse_mode(value);
  } else if (key == "gain") {
    config.gain_override = parse_f64(key, value);
  } else if (key == "bit-error") {
    config.bit_error_override = parse_f64(key, value);
  } else if (key == "sifted-count") {
    config.sifted_override = parse_u64(key, value);
  } else if (key == "phase-lock") {
    config.phase_lock = parse_bool(key, value);
  } else if (key == "drift-sigma") {
    config.drift.sigma_rad_per_sqrt_s = parse_f64(key, value);
  } else if (key == "drift-rate") {
    config.drift.rate_rad_per_s = parse_f64(key, value);
  } else if (key == "drift-initial-spread") {
    config.drift.initial_spread_rad = parse_f64(key, value);
  } else if (key == "lockin-flux-cps") {
    config.lockin.flux_cps = parse_f64(key, value);
  } else if (key == "lockin-efficiency") {
    config.lockin.detection_efficiency = parse_f64(key, value);
  } else if (key == "lockin-visibility") {
    config.lockin.visibility = parse_f64(key, value);
  } else if (key == "threads") {
    config.threads = parse_int(key, value);
  } else {
    throw ConfigError("unknown config key: " + std::string(key));
  }
}

namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() &&
         (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

}  // namespace

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  RunConfig config;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view(line);
    const std::size_t hash = view.find('#');
    if (hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line without '=': " + line);
    }
    apply_config_entry(config, trim(view.substr(0, eq)),
                       trim(view.substr(eq + 1)));
  }
  return config;
}

void load_visibility_table(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open visibility table: " + path);
  const auto length = static_cast<std::size_t>(config.train_length);
  std::vector<double> vis(length, config.visibility);
  std::vector<double> off(length, config.phase_offset_rad);
  std::string line;
  int loaded = 0;
  while (std::getline(in, line)) {
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::istringstream fields((std::string(view)));
    int d = 0;
    double v = 0.0;
    if (!(fields >> d >> v)) {
      throw ConfigError("visibility table: malformed line: " + line);
    }
    double delta = 0.0;
    const bool has_offset = static_cast<bool>(fields >> delta);
    if (d < 1 || d >= config.train_length) {
      throw ConfigError("visibility table: delay out of range: " + line);
    }
    vis[static_cast<std::size_t>(d)] = v;
    if (has_offset) off[static_cast<std::size_t>(d)] = delta;
    ++loaded;
  }
  if (loaded == 0) throw ConfigError("visibility table is empty: " + path);
  config.visibility_by_delay = std::move(vis);
  config.offset_by_delay = std::move(off);
}

}  // namespace rrdps::session

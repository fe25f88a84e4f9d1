#include "rnc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rnc/ops.hpp"

namespace rnc::bench {

namespace {

// Keeps the compiler from dropping the measured loop bodies.
template <typename T>
inline void do_not_optimize(const T& value) {
  asm volatile("" : : "r,m"(value) : "memory");
}

using Clock = std::chrono::steady_clock;

struct OpFns {
  std::function<std::uint64_t(std::uint64_t, std::uint64_t)> plain;
  std::function<EncodedValue(const ModuliSet&, const EncodedValue&,
                             const EncodedValue&, Rng*)>
      enc;
  std::function<bool(const ModuliSet&, const EncodedValue&,
                     const EncodedValue&)>
      enc_bool;  // set for eq/ne instead of enc
};

OpFns op_functions(const std::string& op) {
  if (op == "add") {
    return {[](std::uint64_t a, std::uint64_t b) { return a + b; },
            [](const ModuliSet& ms, const EncodedValue& x,
               const EncodedValue& y, Rng* rng) {
              return add_enc(ms, x, y, rng);
            },
            nullptr};
  }
  if (op == "sub") {
    return {[](std::uint64_t a, std::uint64_t b) { return a - b; },
            [](const ModuliSet& ms, const EncodedValue& x,
               const EncodedValue& y, Rng* rng) {
              return sub_enc(ms, x, y, rng);
            },
            nullptr};
  }
  if (op == "mul") {
    return {[](std::uint64_t a, std::uint64_t b) { return a * b; },
            [](const ModuliSet& ms, const EncodedValue& x,
               const EncodedValue& y, Rng* rng) {
              return mul_enc(ms, x, y, rng);
            },
            nullptr};
  }
  if (op == "eq") {
    return {[](std::uint64_t a, std::uint64_t b) {
              return static_cast<std::uint64_t>(a == b);
            },
            nullptr,
            [](const ModuliSet& ms, const EncodedValue& x,
               const EncodedValue& y) { return eq_enc(ms, x, y); }};
  }
  if (op == "ne") {
    return {[](std::uint64_t a, std::uint64_t b) {
              return static_cast<std::uint64_t>(a != b);
            },
            nullptr,
            [](const ModuliSet& ms, const EncodedValue& x,
               const EncodedValue& y) { return neq_enc(ms, x, y); }};
  }
  throw Error("unknown bench op '" + op + "'");
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : (xs[mid - 1] + xs[mid]) / 2.0;
}

double variance_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kWithRand:
      return "with-rand";
    case Variant::kWithoutRand:
      return "without-rand";
    case Variant::kIrPath:
      return "ir-path";
  }
  return "?";
}

std::optional<Variant> variant_from_name(std::string_view name) {
  if (name == "with-rand") return Variant::kWithRand;
  if (name == "without-rand") return Variant::kWithoutRand;
  if (name == "ir-path") return Variant::kIrPath;
  return std::nullopt;
}

void BenchConfig::validate() const {
  if (repetitions < 1) throw OutOfRangeError("repetitions must be >= 1");
  if (max_count < 0 || count_step < 1) {
    throw OutOfRangeError("counts must be non-negative with step >= 1");
  }
  if (ops.empty() || variants.empty()) {
    throw OutOfRangeError("need at least one op and one variant");
  }
}

BenchReport bench_run(const BenchConfig& config) {
  config.validate();
  const ModuliSet ms(config.moduli);
  BenchReport report;
  report.config = config;

  for (const std::string& op : config.ops) {
    const OpFns fns = op_functions(op);
    for (Variant variant : config.variants) {
      for (int count = 0; count <= config.max_count;
           count += config.count_step) {
        BenchRow row;
        row.op = op;
        row.variant = variant;
        row.count = count;

        if (count == 0) {
          row.null_reason = "zero instruction count";
          report.rows.push_back(std::move(row));
          continue;
        }

        // Identical operand streams for both arms, regenerated from the
        // seed so every variant sees the same inputs.
        Rng stream(config.seed);
        std::vector<std::uint64_t> av(count), bv(count);
        for (int i = 0; i < count; ++i) {
          av[i] = stream() % ms.dynamic_range();
          bv[i] = stream() % ms.dynamic_range();
        }
        std::vector<EncodedValue> ax, bx;
        ax.reserve(count);
        bx.reserve(count);
        Rng shift_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
        const bool shifted_inputs = variant != Variant::kWithoutRand;
        for (int i = 0; i < count; ++i) {
          ax.push_back(shifted_inputs ? encode(ms, av[i], shift_rng)
                                      : encode(ms, av[i]));
          bx.push_back(shifted_inputs ? encode(ms, bv[i], shift_rng)
                                      : encode(ms, bv[i]));
        }
        Rng op_rng(config.seed ^ 0xc2b2ae3d27d4eb4full);
        Rng* reshift = variant == Variant::kWithRand ? &op_rng : nullptr;

        std::vector<double> plain_ns, rnc_ns;
        for (int rep = -1; rep < config.repetitions; ++rep) {
          const auto t0 = Clock::now();
          for (int i = 0; i < count; ++i) {
            do_not_optimize(fns.plain(av[i], bv[i]));
          }
          const auto t1 = Clock::now();
          if (fns.enc_bool) {
            for (int i = 0; i < count; ++i) {
              do_not_optimize(fns.enc_bool(ms, ax[i], bx[i]));
            }
          } else {
            for (int i = 0; i < count; ++i) {
              do_not_optimize(fns.enc(ms, ax[i], bx[i], reshift));
            }
          }
          const auto t2 = Clock::now();
          if (rep < 0) continue;  // warm-up pass
          const double per_plain =
              std::chrono::duration<double, std::nano>(t1 - t0).count() /
              count;
          const double per_rnc =
              std::chrono::duration<double, std::nano>(t2 - t1).count() /
              count;
          plain_ns.push_back(per_plain);
          rnc_ns.push_back(per_rnc);
        }

        row.mean_plain_ns = mean_of(plain_ns);
        row.mean_rnc_ns = mean_of(rnc_ns);
        row.median_rnc_ns = median_of(rnc_ns);
        row.variance_rnc_ns = variance_of(rnc_ns);
        if (row.mean_plain_ns > 0.0) {
          row.ratio = row.mean_rnc_ns / row.mean_plain_ns;
        } else {
          row.null_reason = "plain arm measured zero time";
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

void write_csv(const BenchReport& report, std::ostream& out) {
  out << "op,variant,count,mean_plain_ns,mean_rnc_ns,ratio\n";
  for (const BenchRow& row : report.rows) {
    out << row.op << ',' << variant_name(row.variant) << ',' << row.count
        << ',' << row.mean_plain_ns << ',' << row.mean_rnc_ns << ',';
    if (row.ratio.has_value()) out << *row.ratio;
    out << '\n';
  }
}

void write_json(const BenchReport& report, std::ostream& out) {
  nlohmann::json j;
  j["config"] = {
      {"ops", report.config.ops},
      {"max_count", report.config.max_count},
      {"count_step", report.config.count_step},
      {"repetitions", report.config.repetitions},
      {"seed", report.config.seed},
      {"moduli", report.config.moduli},
  };
  j["rows"] = nlohmann::json::array();
  for (const BenchRow& row : report.rows) {
    nlohmann::json jr = {
        {"op", row.op},
        {"variant", variant_name(row.variant)},
        {"count", row.count},
        {"mean_plain_ns", row.mean_plain_ns},
        {"mean_rnc_ns", row.mean_rnc_ns},
        {"median_rnc_ns", row.median_rnc_ns},
        {"variance_rnc_ns", row.variance_rnc_ns},
    };
    if (row.ratio.has_value()) {
      jr["ratio"] = *row.ratio;
    } else {
      jr["ratio"] = nullptr;
      jr["null_reason"] = row.null_reason;
    }
    j["rows"].push_back(std::move(jr));
  }
  out << j.dump(2) << '\n';
}

namespace {

BenchConfig config_from_json(const nlohmann::json& j) {
  BenchConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "ops") {
      cfg.ops = value.get<std::vector<std::string>>();
    } else if (key == "variants") {
      cfg.variants.clear();
      for (const auto& name : value) {
        const auto v = variant_from_name(name.get<std::string>());
        if (!v) throw Error("unknown variant in config");
        cfg.variants.push_back(*v);
      }
    } else if (key == "max_count") {
      cfg.max_count = value.get<int>();
    } else if (key == "count_step") {
      cfg.count_step = value.get<int>();
    } else if (key == "repetitions") {
      cfg.repetitions = value.get<int>();
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "moduli") {
      cfg.moduli = value.get<std::vector<std::uint64_t>>();
    } else if (key == "randomize") {
      cfg.variants = value.get<bool>()
                         ? std::vector<Variant>{Variant::kWithRand}
                         : std::vector<Variant>{Variant::kWithoutRand};
    } else {
      throw Error("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

BenchConfig config_from_kv(std::istream& in) {
  BenchConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw Error("config line is not key=value: " + line);
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "ops") {
      cfg.ops = split_list(value);
    } else if (key == "variants") {
      cfg.variants.clear();
      for (const std::string& name : split_list(value)) {
        const auto v = variant_from_name(name);
        if (!v) throw Error("unknown variant '" + name + "'");
        cfg.variants.push_back(*v);
      }
    } else if (key == "max_count") {
      cfg.max_count = std::stoi(value);
    } else if (key == "count_step") {
      cfg.count_step = std::stoi(value);
    } else if (key == "repetitions") {
      cfg.repetitions = std::stoi(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "moduli") {
      cfg.moduli.clear();
      for (const std::string& m : split_list(value)) {
        cfg.moduli.push_back(std::stoull(m));
      }
    } else if (key == "randomize") {
      cfg.variants = (value == "on" || value == "true")
                         ? std::vector<Variant>{Variant::kWithRand}
                         : std::vector<Variant>{Variant::kWithoutRand};
    } else {
      throw Error("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace

BenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return config_from_json(nlohmann::json::parse(text));
  }
  std::istringstream kv(text);
  return config_from_kv(kv);
}

}  // namespace rnc::bench

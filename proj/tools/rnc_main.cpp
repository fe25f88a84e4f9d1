// Command-line front end: encode, decode, ops-demo, aes, audit, transform,
// attack-calc and bench subcommands over the rncguard library.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rnc/aes.hpp"
#include "rnc/attack.hpp"
#include "rnc/audit.hpp"
#include "rnc/bench.hpp"
#include "rnc/containers.hpp"
#include "rnc/ir_interp.hpp"
#include "rnc/ir_passes.hpp"
#include "rnc/ops.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 0x5eed;

std::uint64_t seed_or_env(std::optional<std::uint64_t> seed) {
  if (seed.has_value()) return *seed;
  if (const char* env = std::getenv("HOACS_SEED")) {
    return std::stoull(env);
  }
  return kDefaultSeed;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& csv) {
  std::vector<std::uint64_t> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stoull(item));
  }
  return values;
}

std::string join_components(const rnc::EncodedValue& v) {
  std::string out;
  for (std::size_t i = 0; i < v.components.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(v.components[i]);
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw rnc::IoError("cannot write " + path.string());
  out << text;
}

struct CommonOpts {
  std::optional<std::uint64_t> seed;
  bool as_json = false;
};

void cmd_encode(const std::string& moduli_csv, std::uint64_t value,
                bool no_shift, bool signed_mode, std::int64_t signed_value,
                const CommonOpts& common) {
  const rnc::ModuliSet ms(parse_u64_list(moduli_csv));
  rnc::Rng rng(seed_or_env(common.seed));
  rnc::EncodedValue enc;
  if (signed_mode) {
    enc = no_shift ? rnc::encode_signed(ms, signed_value)
                   : rnc::encode_signed(ms, signed_value, rng);
  } else {
    enc = no_shift ? rnc::encode(ms, value) : rnc::encode(ms, value, rng);
  }
  if (common.as_json) {
    json j;
    j["moduli"] = std::vector<std::uint64_t>(ms.moduli().begin(),
                                             ms.moduli().end());
    j["components"] = enc.components;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << join_components(enc) << '\n';
  }
}

void cmd_decode(const std::string& moduli_csv, const std::string& comps_csv,
                bool signed_mode, const CommonOpts& common) {
  const rnc::ModuliSet ms(parse_u64_list(moduli_csv));
  rnc::EncodedValue enc;
  enc.components = parse_u64_list(comps_csv);
  enc.moduli_id = ms.id();
  if (enc.components.size() != ms.count()) {
    throw rnc::OutOfRangeError("need one component per modulus");
  }
  if (common.as_json) {
    json j;
    if (signed_mode) {
      j["value"] = rnc::decode_signed(ms, enc);
    } else {
      j["value"] = rnc::decode(ms, enc);
    }
    std::cout << j.dump() << '\n';
  } else if (signed_mode) {
    std::cout << rnc::decode_signed(ms, enc) << '\n';
  } else {
    std::cout << rnc::decode(ms, enc) << '\n';
  }
}

void cmd_ops_demo(const std::string& moduli_csv, std::uint64_t a,
                  std::uint64_t b, unsigned width, const CommonOpts& common) {
  const rnc::ModuliSet ms(parse_u64_list(moduli_csv));
  rnc::Rng rng(seed_or_env(common.seed));
  const rnc::EncodedValue x = rnc::encode(ms, a, rng);
  const rnc::EncodedValue y = rnc::encode(ms, b, rng);

  json j;
  j["moduli"] = std::vector<std::uint64_t>(ms.moduli().begin(),
                                           ms.moduli().end());
  j["a"] = a;
  j["b"] = b;
  j["add"] = rnc::decode(ms, rnc::add_enc(ms, x, y, &rng));
  j["sub"] = rnc::decode(ms, rnc::sub_enc(ms, x, y, &rng));
  j["mul"] = rnc::decode(ms, rnc::mul_enc(ms, x, y, &rng));
  j["shl1"] = rnc::decode(ms, rnc::shl_enc(ms, x, 1, &rng));
  j["pow2"] = rnc::decode(ms, rnc::pow_enc(ms, x, 2, &rng));
  j["less_than"] = rnc::less_than(ms, x, y);
  j["eq"] = rnc::eq_enc(ms, x, y);
  j["neq"] = rnc::neq_enc(ms, x, y);
  if (b != 0) {
    const rnc::DivResult d = rnc::div_int(ms, x, y, &rng);
    j["div"] = rnc::decode(ms, d.quotient);
    j["mod"] = rnc::decode(ms, d.remainder);
  }
  const std::uint64_t bound = std::uint64_t{1} << width;
  if (a < bound && b < bound && bound <= ms.dynamic_range()) {
    j["xor"] = rnc::decode(ms, rnc::xor_enc(ms, x, y, width, &rng));
    j["or"] = rnc::decode(ms, rnc::or_enc(ms, x, y, width, &rng));
  }
  if (common.as_json) {
    std::cout << j.dump() << '\n';
  } else {
    for (const auto& [key, value] : j.items()) {
      std::cout << key << ": " << value.dump() << '\n';
    }
  }
}

rnc::audit::RunMode mode_from_name(const std::string& name) {
  if (name == "baseline") return rnc::audit::RunMode::kBaseline;
  if (name == "protected-tree") return rnc::audit::RunMode::kProtectedTree;
  if (name == "protected-grid") return rnc::audit::RunMode::kProtectedGrid;
  throw rnc::Error("unknown mode '" + name + "'");
}

void write_audit_files(const fs::path& dir, const std::string& stem,
                       const rnc::audit::TracedRun& run,
                       const rnc::audit::LeakReport& report) {
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / (stem + "_trace.csv"));
    if (!csv) throw rnc::IoError("cannot write trace csv");
    rnc::trace::write_csv(run.log, csv);
  }
  {
    std::ofstream jsn(dir / (stem + "_report.json"));
    if (!jsn) throw rnc::IoError("cannot write report json");
    rnc::audit::write_report_json(report, jsn);
  }
}

void cmd_aes(const std::string& key_hex, const std::string& block_hex,
             const std::string& mode_name, const std::string& moduli_csv,
             const std::string& audit_dir, const CommonOpts& common) {
  const rnc::aes::Key key = rnc::aes::array_from_hex<16>(key_hex);
  const rnc::aes::Block block = rnc::aes::array_from_hex<16>(block_hex);
  const rnc::ModuliSet ms(parse_u64_list(moduli_csv));
  rnc::Rng rng(seed_or_env(common.seed));
  const rnc::audit::RunMode mode = mode_from_name(mode_name);

  rnc::aes::Block ciphertext;
  if (audit_dir.empty()) {
    switch (mode) {
      case rnc::audit::RunMode::kBaseline:
        ciphertext = rnc::aes::aes128_encrypt_baseline(key, block);
        break;
      case rnc::audit::RunMode::kProtectedTree:
        ciphertext = rnc::aes::aes128_encrypt_protected(
            key, block, ms, rng, rnc::aes::SboxLookup::kTree);
        break;
      case rnc::audit::RunMode::kProtectedGrid:
        ciphertext = rnc::aes::aes128_encrypt_protected(
            key, block, ms, rng, rnc::aes::SboxLookup::kGrid);
        break;
    }
  } else {
    const rnc::audit::TracedRun run =
        rnc::audit::run_traced(mode, key, block, ms, rng);
    const rnc::audit::LeakReport report = rnc::audit::find_keys(
        run.log, key, rnc::aes::key_schedule_baseline(key));
    write_audit_files(audit_dir, mode_name, run, report);
    ciphertext = run.ciphertext;
  }

  if (common.as_json) {
    json j;
    j["ciphertext"] = rnc::aes::to_hex(ciphertext);
    j["mode"] = mode_name;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << rnc::aes::to_hex(ciphertext) << '\n';
  }
}

void cmd_audit(const std::vector<std::string>& key_hexes,
               const std::string& block_hex, const std::string& mode_name,
               const std::string& moduli_csv, const std::string& out_dir,
               const CommonOpts& common) {
  if (key_hexes.size() < 2) {
    throw rnc::NeedTwoKeysError("audit needs at least two keys");
  }
  const rnc::aes::Block block = rnc::aes::array_from_hex<16>(block_hex);
  const rnc::ModuliSet ms(parse_u64_list(moduli_csv));
  const rnc::audit::RunMode mode = mode_from_name(mode_name);

  std::vector<rnc::audit::LeakReport> reports;
  for (std::size_t i = 0; i < key_hexes.size(); ++i) {
    const rnc::aes::Key key = rnc::aes::array_from_hex<16>(key_hexes[i]);
    rnc::Rng rng(seed_or_env(common.seed) + i);
    const rnc::audit::TracedRun run =
        rnc::audit::run_traced(mode, key, block, ms, rng);
    reports.push_back(rnc::audit::find_keys(
        run.log, key, rnc::aes::key_schedule_baseline(key)));
    write_audit_files(out_dir, "key" + std::to_string(i), run,
                      reports.back());
  }
  rnc::audit::apply_cross_key_flags(reports);

  json cross;
  cross["mode"] = mode_name;
  cross["flagged_byte_values"] = reports.front().cross_key_flagged;
  std::uint64_t protected_word_hits = 0;
  for (const auto& r : reports) {
    protected_word_hits += r.word_hits_in_protected_segments();
  }
  cross["round_key_word_hits_segments_1_2"] = protected_word_hits;
  write_text_file(fs::path(out_dir) / "cross_key.json", cross.dump(2) + "\n");
  std::cout << cross.dump() << '\n';
}

void cmd_transform(const std::string& in_path, const std::string& out_path,
                   std::optional<std::uint64_t> m1,
                   std::optional<std::uint64_t> m2,
                   const CommonOpts& common) {
  std::ifstream in(in_path);
  if (!in) throw rnc::IoError("cannot open " + in_path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  const rnc::ir::Module module = rnc::ir::parse_module(buffer.str());
  const rnc::ModuliSet ms = (m1.has_value() && m2.has_value())
                                ? rnc::ModuliSet({*m1, *m2})
                                : rnc::ir::select_moduli(32);
  const std::uint64_t seed = seed_or_env(common.seed);
  rnc::Rng rng(seed);
  const rnc::ir::Module transformed = rnc::ir::transform(module, ms, rng);
  write_text_file(out_path,
                  rnc::ir::write_transformed(transformed, seed, ms));
}

void cmd_attack_calc(unsigned bits, std::uint64_t t_exec, double s_cpu,
                     std::uint64_t n_dr, std::uint64_t gamma,
                     std::uint64_t max_modulus, std::uint64_t moduli_count) {
  rnc::attack::AttackParams p;
  p.register_bits = bits;
  p.encode_cycles = t_exec;
  p.cpu_hz = s_cpu;
  p.data_registers = n_dr;
  p.trojan_states = gamma;
  p.max_modulus = max_modulus;
  p.moduli_count = moduli_count;

  const double comb = rnc::attack::trojan_test_time_s(
      p, rnc::attack::TrojanModel::kCombinational);
  const double seq = rnc::attack::trojan_test_time_s(
      p, rnc::attack::TrojanModel::kSequential);
  const rnc::attack::BruteForceCost cost =
      rnc::attack::brute_force_cost(max_modulus, moduli_count);

  json j;
  j["params"] = {{"register_bits", bits},   {"encode_cycles", t_exec},
                 {"cpu_hz", s_cpu},         {"data_registers", n_dr},
                 {"trojan_states", gamma},  {"max_modulus", max_modulus},
                 {"moduli_count", moduli_count}};
  j["combinational_s"] = comb;
  j["combinational_min"] = comb / 60.0;
  j["sequential_s"] = seq;
  j["sequential_min"] = seq / 60.0;
  j["brute_force_ops"] = cost.overflowed ? json("inf") : json(cost.total_ops);
  j["crt_solve_ops"] = cost.crt_solve_ops;
  j["reference_combinational_min"] = 9.44;
  j["reference_sequential_min"] = 2.89;
  j["annotation"] = rnc::attack::kSequentialDiscrepancyNote;
  std::cout << j.dump(2) << '\n';
}

void cmd_bench(const std::string& config_path, const std::string& ops_csv,
               const std::string& variants_csv, int reps, int max_count,
               int step, const std::string& moduli_csv,
               const std::string& out_dir, const CommonOpts& common) {
  rnc::bench::BenchConfig cfg;
  if (!config_path.empty()) cfg = rnc::bench::load_config(config_path);
  if (!ops_csv.empty()) {
    cfg.ops.clear();
    std::stringstream ss(ops_csv);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.ops.push_back(item);
  }
  if (!variants_csv.empty()) {
    cfg.variants.clear();
    std::stringstream ss(variants_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto v = rnc::bench::variant_from_name(item);
      if (!v) throw rnc::Error("unknown variant '" + item + "'");
      cfg.variants.push_back(*v);
    }
  }
  if (reps > 0) cfg.repetitions = reps;
  if (max_count >= 0) cfg.max_count = max_count;
  if (step > 0) cfg.count_step = step;
  if (!moduli_csv.empty()) cfg.moduli = parse_u64_list(moduli_csv);
  if (common.seed.has_value() || std::getenv("HOACS_SEED") != nullptr) {
    cfg.seed = seed_or_env(common.seed);
  }

  const rnc::bench::BenchReport report = rnc::bench::bench_run(cfg);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "bench.csv");
    if (!csv) throw rnc::IoError("cannot write bench.csv");
    rnc::bench::write_csv(report, csv);
    std::ofstream jsn(fs::path(out_dir) / "bench.json");
    if (!jsn) throw rnc::IoError("cannot write bench.json");
    rnc::bench::write_json(report, jsn);
  }
  std::ostringstream out;
  if (common.as_json) {
    rnc::bench::write_json(report, out);
  } else {
    rnc::bench::write_csv(report, out);
  }
  std::cout << out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"residue-number-coding data obfuscation toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--seed", common.seed,
                 "seed for every random choice (falls back to HOACS_SEED)");
  app.add_flag("--json", common.as_json, "machine-readable output");

  auto* enc = app.add_subcommand("encode", "encode a value into residues");
  std::string enc_moduli = "17,19";
  std::uint64_t enc_value = 0;
  std::int64_t enc_signed_value = 0;
  bool enc_no_shift = false;
  enc->add_option("--moduli", enc_moduli, "comma-separated moduli");
  auto* enc_value_opt =
      enc->add_option("--value", enc_value, "value in [0, M)");
  auto* enc_signed_opt =
      enc->add_option("--signed-value", enc_signed_value,
                      "signed value in [-floor(M/2), ceil(M/2))");
  enc->add_flag("--no-shift", enc_no_shift, "skip random multiple shifting");
  enc_value_opt->excludes(enc_signed_opt);

  auto* dec = app.add_subcommand("decode", "decode residues back to a value");
  std::string dec_moduli = "17,19";
  std::string dec_components;
  bool dec_signed = false;
  dec->add_option("--moduli", dec_moduli, "comma-separated moduli");
  dec->add_option("--components", dec_components, "comma-separated residues")
      ->required();
  dec->add_flag("--signed", dec_signed, "interpret through the signed range");

  auto* demo =
      app.add_subcommand("ops-demo", "run the operation catalog demo");
  std::string demo_moduli = "17,19";
  std::uint64_t demo_a = 29;
  std::uint64_t demo_b = 27;
  unsigned demo_width = 8;
  demo->add_option("--moduli", demo_moduli, "comma-separated moduli");
  demo->add_option("--a", demo_a, "left operand");
  demo->add_option("--b", demo_b, "right operand");
  demo->add_option("--width", demo_width, "bit width for xor/or");

  auto* aes_cmd = app.add_subcommand("aes", "single-block AES-128 encrypt");
  std::string aes_key, aes_block, aes_audit;
  std::string aes_mode = "protected-grid";
  std::string aes_moduli = "17,19";
  aes_cmd->add_option("--key", aes_key, "key, 32 hex digits")->required();
  aes_cmd->add_option("--block", aes_block, "block, 32 hex digits")
      ->required();
  aes_cmd->add_option("--mode", aes_mode,
                      "baseline | protected-tree | protected-grid");
  aes_cmd->add_option("--moduli", aes_moduli, "comma-separated moduli");
  aes_cmd->add_option("--audit", aes_audit,
                      "directory for trace csv and leak report");

  auto* audit_cmd =
      app.add_subcommand("audit", "trace several keys and cross-filter");
  std::vector<std::string> audit_keys;
  std::string audit_block, audit_out;
  std::string audit_mode = "protected-grid";
  std::string audit_moduli = "17,19";
  audit_cmd->add_option("--keys", audit_keys, "two or more keys, hex")
      ->required()
      ->delimiter(',');
  audit_cmd->add_option("--block", audit_block, "block, 32 hex digits")
      ->required();
  audit_cmd->add_option("--mode", audit_mode,
                        "baseline | protected-tree | protected-grid");
  audit_cmd->add_option("--moduli", audit_moduli, "comma-separated moduli");
  audit_cmd->add_option("--out", audit_out, "output directory")->required();

  auto* tr = app.add_subcommand("transform", "apply the IR protection pass");
  std::string tr_in, tr_out;
  std::optional<std::uint64_t> tr_m1, tr_m2;
  tr->add_option("--in", tr_in, "input .ir file")->required();
  tr->add_option("--out", tr_out, "output .ir file")->required();
  tr->add_option("--m1", tr_m1, "first modulus (default: automatic)");
  tr->add_option("--m2", tr_m2, "second modulus (default: automatic)");

  auto* calc =
      app.add_subcommand("attack-calc", "closed-form attack cost estimates");
  unsigned calc_bits = 32;
  std::uint64_t calc_t_exec = 66;
  double calc_s_cpu = 4e9;
  std::uint64_t calc_n_dr = 8;
  std::uint64_t calc_gamma = 5;
  std::uint64_t calc_m = 323;
  std::uint64_t calc_k = 2;
  calc->add_option("--bits", calc_bits, "data register width b");
  calc->add_option("--t-exec", calc_t_exec, "encoding duration in cycles");
  calc->add_option("--s-cpu", calc_s_cpu, "clock rate in Hz");
  calc->add_option("--n-dr", calc_n_dr, "number of data registers");
  calc->add_option("--gamma", calc_gamma, "sequential trigger state count");
  calc->add_option("--max-modulus", calc_m, "M for the brute-force bound");
  calc->add_option("--moduli-count", calc_k, "k for the brute-force bound");

  auto* bench_cmd = app.add_subcommand("bench", "overhead microbenchmarks");
  std::string bench_cfg, bench_ops, bench_variants, bench_moduli, bench_out;
  int bench_reps = 0;
  int bench_max = -1;
  int bench_step = 0;
  bench_cmd->add_option("--config", bench_cfg,
                        "key=value or JSON config file");
  bench_cmd->add_option("--ops", bench_ops, "comma-separated op list");
  bench_cmd->add_option("--variants", bench_variants,
                        "with-rand,without-rand,ir-path");
  bench_cmd->add_option("--reps", bench_reps, "repetitions per cell");
  bench_cmd->add_option("--max-count", bench_max,
                        "largest instruction count");
  bench_cmd->add_option("--step", bench_step, "instruction count step");
  bench_cmd->add_option("--moduli", bench_moduli, "comma-separated moduli");
  bench_cmd->add_option("--out", bench_out,
                        "directory for csv/json reports");

  try {
    app.parse(argc, argv);
    if (enc->parsed()) {
      cmd_encode(enc_moduli, enc_value, enc_no_shift,
                 enc_signed_opt->count() > 0, enc_signed_value, common);
    } else if (dec->parsed()) {
      cmd_decode(dec_moduli, dec_components, dec_signed, common);
    } else if (demo->parsed()) {
      cmd_ops_demo(demo_moduli, demo_a, demo_b, demo_width, common);
    } else if (aes_cmd->parsed()) {
      cmd_aes(aes_key, aes_block, aes_mode, aes_moduli, aes_audit, common);
    } else if (audit_cmd->parsed()) {
      cmd_audit(audit_keys, audit_block, audit_mode, audit_moduli, audit_out,
                common);
    } else if (tr->parsed()) {
      cmd_transform(tr_in, tr_out, tr_m1, tr_m2, common);
    } else if (calc->parsed()) {
      cmd_attack_calc(calc_bits, calc_t_exec, calc_s_cpu, calc_n_dr,
                      calc_gamma, calc_m, calc_k);
    } else if (bench_cmd->parsed()) {
      cmd_bench(bench_cfg, bench_ops, bench_variants, bench_reps, bench_max,
                bench_step, bench_moduli, bench_out, common);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const rnc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

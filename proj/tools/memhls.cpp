// memhls: memory-constrained scheduling of signal flow graphs.
//
//   memhls gen   fir|lms|fft --n N [--banks B] [--interleave K] [--out DIR]
//   memhls check FILE.sfg [--map FILE.csv] [--schedule FILE.csv ...timing flags]
//   memhls synth FILE.sfg (--map FILE.csv | --auto-map) [flags] [--out DIR] [--dot] [--trace]
//   memhls sweep --gen fir|lms|fft --sizes LIST --cadences LIST [--banks LIST] [--interleave LIST]

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memhls/memhls.hpp"

namespace fs = std::filesystem;
using namespace memhls;

namespace {

constexpr int kExitInput = 1;     // parse/validation problems
constexpr int kExitSchedule = 2;  // infeasible cadence or deadline miss

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << text;
}

// "900:60:-10" (inclusive range) or "16,32,64".
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  auto num = [&](const std::string& s) {
    auto v = detail::parse_number<int>(s);
    if (!v) throw UsageError("bad number '" + s + "' in '" + text + "'");
    return *v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("range must be FROM:TO[:STEP]: '" + text + "'");
    const int from = num(parts[0]), to = num(parts[1]);
    const int step = parts.size() == 3 ? num(parts[2]) : (to >= from ? 1 : -1);
    if (step == 0 || (to - from) * step < 0) throw UsageError("range step does not reach the end: '" + text + "'");
    for (int v = from; step > 0 ? v <= to : v >= to; v += step) out.push_back(v);
    return out;
  }
  for (const auto& f : detail::split_csv(text))
    if (!f.empty()) out.push_back(num(f));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// "mul=2,alu=1". alu also sets add and sub unless they are given.
KindLatencies parse_latencies(const std::string& text, KindLatencies base) {
  bool add_set = false, sub_set = false;
  std::optional<int> alu;
  for (const auto& f : detail::split_csv(text)) {
    if (f.empty()) continue;
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw UsageError("latency entries look like mul=2: '" + f + "'");
    const auto key = f.substr(0, eq);
    const auto v = detail::parse_number<int>(std::string_view(f).substr(eq + 1));
    if (!v) throw UsageError("bad latency '" + f + "'");
    if (key == "mul") base.mul = *v;
    else if (key == "add") base.add = *v, add_set = true;
    else if (key == "sub") base.sub = *v, sub_set = true;
    else if (key == "alu") alu = *v;
    else throw UsageError("unknown operator kind '" + key + "'");
  }
  if (alu) {
    base.alu = *alu;
    if (!add_set) base.add = *alu;
    if (!sub_set) base.sub = *alu;
  }
  return base;
}

// "1m2a" or "mul=1,alu=2".
ResourceSet parse_operators(const std::string& text) {
  ResourceSet r{0, 0};
  int m = 0, a = 0;
  char cm = 0, ca = 0;
  if (std::sscanf(text.c_str(), "%d%c%d%c", &m, &cm, &a, &ca) == 4 && cm == 'm' && ca == 'a') return {m, a};
  for (const auto& f : detail::split_csv(text)) {
    const auto eq = f.find('=');
    const auto v = eq == std::string::npos ? std::nullopt : detail::parse_number<int>(std::string_view(f).substr(eq + 1));
    if (!v) throw UsageError("operators look like 1m2a or mul=1,alu=2: '" + text + "'");
    if (f.substr(0, eq) == "mul") r.mul = *v;
    else if (f.substr(0, eq) == "alu") r.alu = *v;
    else throw UsageError("unknown operator class '" + f.substr(0, eq) + "'");
  }
  return r;
}

struct TimingFlags {
  int cadence = 1000;
  int w_seq = 1;
  int w_rand = 2;
  std::string latency;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--cadence", cadence, "Cycles available per iteration")->capture_default_str();
    cmd.add_option("--wseq", w_seq, "Cycles per address-adjacent access")->capture_default_str();
    cmd.add_option("--wrand", w_rand, "Cycles per non-adjacent access")->capture_default_str();
    cmd.add_option("--latency", latency, "Operator latencies, e.g. mul=2,alu=1 (default mul=2,alu=1)");
  }

  TimingConfig config(KindLatencies base = {}) const {
    TimingConfig cfg;
    cfg.cadence = cadence;
    cfg.w_seq = w_seq;
    cfg.w_rand = w_rand;
    cfg.latency = latency.empty() ? base : parse_latencies(latency, base);
    return cfg;
  }
};

AgeingMode mode_from(const std::string& s) {
  auto m = parse_mode(s);
  if (!m) throw UsageError("mode must be circular or shift, not '" + s + "'");
  return *m;
}

void print_diagnostics(const std::string& file, const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << file << ": " << to_string(d) << '\n';
}

Sfg load_sfg(const std::string& path) {
  try {
    return parse_sfg(read_file(path));
  } catch (const ValidationError& e) {
    print_diagnostics(path, e.diagnostics());
    throw;
  } catch (const ParseError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    throw;
  }
}

MemoryTable load_mapping(const std::string& path) {
  try {
    return parse_mapping(read_file(path));
  } catch (const ParseError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    throw;
  }
}

std::string stem_of(const std::string& path) {
  auto s = fs::path(path).filename().string();
  if (auto dot = s.find('.'); dot != std::string::npos && dot > 0) s = s.substr(0, dot);
  return s;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string generator;
  std::size_t n = 16;
  int banks = 2;
  int ports = 1;
  int interleave = 0;
  std::string out = ".";
};

int run_gen(const GenArgs& a) {
  const auto b = parse_benchmark(a.generator);
  if (!b) throw UsageError("generator must be fir, lms or fft");
  const auto g = benchmark_graph(*b, a.n);
  const auto table = reference_mapping(*b, g, a.banks, a.interleave, a.ports);
  const auto stem = std::string(benchmark_name(*b)) + std::to_string(a.n);
  const fs::path dir(a.out);
  write_file(dir / (stem + ".sfg"), emit_sfg(g));
  write_file(dir / (stem + ".map.csv"), emit_mapping(table));
  std::cout << (dir / (stem + ".sfg")).string() << '\n' << (dir / (stem + ".map.csv")).string() << '\n';
  return 0;
}

struct CheckArgs {
  std::string sfg;
  std::string map;
  std::string schedule;
  std::string operators;
  TimingFlags timing;
};

int run_check(const CheckArgs& a) {
  const auto g = load_sfg(a.sfg);
  int status = 0;
  std::cout << a.sfg << ": ok (" << g.arithmetic_count() << " operations, " << g.size() << " vertices)\n";
  if (!a.map.empty()) {
    const auto table = load_mapping(a.map);
    const auto diags = validate_mapping(table, g);
    if (!diags.empty()) {
      print_diagnostics(a.map, diags);
      return kExitInput;
    }
    std::cout << a.map << ": ok (" << table.entries.size() << " entries, " << table.bank_count << " banks)\n";
    if (!a.schedule.empty()) {
      if (a.operators.empty()) throw UsageError("--schedule needs --operators");
      const auto s = parse_schedule_csv(read_file(a.schedule), g, table);
      const auto vd = verify_schedule(s, g, table, parse_operators(a.operators), a.timing.config());
      if (!vd.empty()) {
        print_diagnostics(a.schedule, vd);
        status = kExitSchedule;
      } else {
        std::cout << a.schedule << ": ok (latency " << s.latency << ")\n";
      }
    }
  } else if (!a.schedule.empty()) {
    throw UsageError("--schedule needs --map");
  }
  return status;
}

struct SynthArgs {
  std::string sfg;
  std::string map;
  bool auto_map = false;
  int banks = 2;
  int ports = 1;
  int interleave = 0;
  int threshold = 0;
  std::string mode = "circular";
  std::string operators;
  std::string out = "out";
  bool dot = false;
  bool trace = false;
  TimingFlags timing;
};

int run_synth(const SynthArgs& a, const CLI::App& cmd) {
  const auto g = load_sfg(a.sfg);
  MemoryTable table;
  if (a.auto_map) {
    const auto t0 = extract_table(g);
    const auto cfg = a.timing.config();
    table = auto_place(t0, datum_lifetimes(g, cfg), a.threshold, a.banks,
                       a.interleave > 0 ? a.interleave : contiguous_block(t0, a.banks));
    table.ports_per_bank = a.ports;
  } else {
    if (a.map.empty()) throw UsageError("synth needs --map FILE or --auto-map");
    table = load_mapping(a.map);
    if (cmd.count("--ports")) table.ports_per_bank = a.ports;
  }

  SynthesisOptions opt;
  opt.cfg = a.timing.config();
  opt.mode = mode_from(a.mode);
  if (!a.operators.empty()) opt.resources = parse_operators(a.operators);

  SynthesisResult res;
  try {
    res = run_synthesis(g, table, opt);
  } catch (const ValidationError& e) {
    print_diagnostics(a.auto_map ? a.sfg : a.map, e.diagnostics());
    return kExitInput;
  }

  const auto stem = stem_of(a.sfg);
  const fs::path dir(a.out);
  std::vector<fs::path> written{dir / (stem + ".schedule.csv"), dir / (stem + ".report.json")};
  write_file(written[0], emit_schedule_csv(res.schedule, g));
  write_file(written[1], report_text(res.report));
  if (a.auto_map) {
    written.push_back(dir / (stem + ".map.csv"));
    write_file(written.back(), emit_mapping(table));
  }
  if (a.dot) {
    std::ostringstream sfg_dot, mcg_dot;
    write_sfg_dot(sfg_dot, g, &res.schedule);
    for (const auto& m : build_all_mcgs(table)) write_mcg_dot(mcg_dot, m);
    written.push_back(dir / (stem + ".sfg.dot"));
    write_file(written.back(), sfg_dot.str());
    written.push_back(dir / (stem + ".mcg.dot"));
    write_file(written.back(), mcg_dot.str());
  }
  if (a.trace) {
    written.push_back(dir / (stem + ".trace.csv"));
    write_file(written.back(), emit_trace_csv(address_trace(res.schedule, g, table)));
  }

  const auto& r = res.report;
  std::cout << stem << ": latency " << r.latency << " reads " << r.access.reads << " writes " << r.access.writes
            << " (" << mode_name(r.access.mode) << ") mul " << r.resources.mul << " alu " << r.resources.alu
            << " registers " << r.registers << " bursts " << r.access.bursts << '\n';
  for (const auto& p : written) std::cout << "  wrote " << p.string() << '\n';
  if (!r.diagnostics.empty()) {
    print_diagnostics(written[0].string(), r.diagnostics);
    return kExitSchedule;
  }
  return 0;
}

struct SweepArgs {
  std::string generator;
  std::string sizes;
  std::string cadences;
  std::string banks = "2";
  std::string interleave = "0";
  int ports = 1;
  std::string mode = "circular";
  std::string operators;
  std::string out;
  int w_seq = 1;
  int w_rand = 2;
  std::string latency;
};

int run_sweep(const SweepArgs& a) {
  const auto b = parse_benchmark(a.generator);
  if (!b) throw UsageError("generator must be fir, lms or fft");
  SweepSpec spec;
  spec.benchmark = *b;
  for (int n : parse_int_list(a.sizes)) {
    if (n < 1) throw UsageError("sizes must be >= 1");
    spec.sizes.push_back(static_cast<std::size_t>(n));
  }
  spec.cadences = parse_int_list(a.cadences);
  spec.banks = parse_int_list(a.banks);
  spec.interleave = parse_int_list(a.interleave);
  spec.ports = a.ports;
  spec.mode = mode_from(a.mode);
  spec.timing = benchmark_timing(*b);
  spec.timing.w_seq = a.w_seq;
  spec.timing.w_rand = a.w_rand;
  if (!a.latency.empty()) spec.timing.latency = parse_latencies(a.latency, spec.timing.latency);
  if (!a.operators.empty()) spec.resources = parse_operators(a.operators);

  const auto csv = emit_sweep_csv(sweep(spec));
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    const auto path = fs::path(a.out) / ("sweep_" + std::string(benchmark_name(*b)) + ".csv");
    write_file(path, csv);
    std::cout << "wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-constrained list scheduling of signal flow graphs"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Emit a benchmark SFG and its reference mapping");
  gen_cmd->add_option("generator", gen.generator, "fir, lms or fft")->required();
  gen_cmd->add_option("--n", gen.n, "Taps (fir/lms) or points (fft)")->capture_default_str();
  gen_cmd->add_option("--banks", gen.banks, "Memory banks")->capture_default_str();
  gen_cmd->add_option("--ports", gen.ports, "Ports per bank")->capture_default_str();
  gen_cmd->add_option("--interleave", gen.interleave, "map2_k block size (0: reference mapping)")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output directory")->capture_default_str();

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Validate an SFG, a mapping and optionally a schedule");
  check_cmd->add_option("sfg", check.sfg, "SFG file")->required();
  check_cmd->add_option("--map", check.map, "Mapping CSV");
  check_cmd->add_option("--schedule", check.schedule, "Schedule CSV to verify");
  check_cmd->add_option("--operators", check.operators, "Operator counts of the schedule, e.g. 1m2a");
  check.timing.add_to(*check_cmd);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Schedule one SFG and write the schedule and report");
  synth_cmd->add_option("sfg", synth.sfg, "SFG file")->required();
  auto* map_opt = synth_cmd->add_option("--map", synth.map, "Mapping CSV");
  synth_cmd->add_flag("--auto-map", synth.auto_map, "Place data automatically")->excludes(map_opt);
  synth_cmd->add_option("--banks", synth.banks, "Banks for --auto-map")->capture_default_str();
  synth_cmd->add_option("--ports", synth.ports, "Ports per bank")->capture_default_str();
  synth_cmd->add_option("--interleave", synth.interleave, "Block size for --auto-map (0: contiguous)");
  synth_cmd->add_option("--threshold", synth.threshold, "Lifetime below which --auto-map uses registers")
      ->capture_default_str();
  synth_cmd->add_option("--mode", synth.mode, "Ageing-vector accounting: circular or shift")->capture_default_str();
  synth_cmd->add_option("--operators", synth.operators, "Fixed operator counts, e.g. 1m2a (default: allocate)");
  synth_cmd->add_option("--out", synth.out, "Output directory")->capture_default_str();
  synth_cmd->add_flag("--dot", synth.dot, "Also write SFG and MCG DOT files");
  synth_cmd->add_flag("--trace", synth.trace, "Also write the circular-buffer address trace");
  synth.timing.add_to(*synth_cmd);

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Cross-product exploration over a benchmark generator");
  sweep_cmd->add_option("--gen", sw.generator, "fir, lms or fft")->required();
  sweep_cmd->add_option("--sizes", sw.sizes, "Sizes, e.g. 16,32 or 16:64:16")->required();
  sweep_cmd->add_option("--cadences", sw.cadences, "Cadences, e.g. 900:60:-10")->required();
  sweep_cmd->add_option("--banks", sw.banks, "Bank counts")->capture_default_str();
  sweep_cmd->add_option("--interleave", sw.interleave, "map2_k block sizes (0: reference mapping)")
      ->capture_default_str();
  sweep_cmd->add_option("--ports", sw.ports, "Ports per bank")->capture_default_str();
  sweep_cmd->add_option("--mode", sw.mode, "circular or shift")->capture_default_str();
  sweep_cmd->add_option("--operators", sw.operators, "Fixed operator counts (default: allocate per point)");
  sweep_cmd->add_option("--wseq", sw.w_seq, "Cycles per address-adjacent access")->capture_default_str();
  sweep_cmd->add_option("--wrand", sw.w_rand, "Cycles per non-adjacent access")->capture_default_str();
  sweep_cmd->add_option("--latency", sw.latency, "Operator latencies (default: benchmark reference)");
  sweep_cmd->add_option("--out", sw.out, "Output directory (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*check_cmd) return run_check(check);
    if (*synth_cmd) return run_synth(synth, *synth_cmd);
    if (*sweep_cmd) return run_sweep(sw);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParseError&) {
    return kExitInput;  // already reported with file context
  } catch (const ValidationError&) {
    return kExitInput;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitSchedule;
  } catch (const DeadlineMiss& e) {
    std::cerr << "unschedulable: " << e.what() << '\n';
    return kExitSchedule;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}

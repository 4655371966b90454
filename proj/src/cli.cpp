#include "rfic/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rfic/chain.hpp"
#include "rfic/coarsegrain.hpp"
#include "rfic/continuum.hpp"
#include "rfic/experiments.hpp"
#include "rfic/parallel.hpp"
#include "rfic/svg.hpp"

namespace rfic::cli {

namespace {

using nlohmann::json;

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::Fe, "fe"},         {Command::Flips, "flips"},
    {Command::Continuum, "continuum"}, {Command::W1, "w1"},
    {Command::VerifyBounds, "verify-bounds"}, {Command::Sweep, "sweep"},
    {Command::Sandwich, "sandwich"},
};

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ValidationError(field + ": " + msg);
}

double parse_number(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(s, &used);
    } catch (const std::exception&) {
      fail(field, "not a number: '" + s + "'");
    }
    if (used != s.size()) fail(field, "not a number: '" + s + "'");
    return d;
  }
  fail(field, "expected a number");
}

double finite_number(const json& v, const std::string& field) {
  const double d = parse_number(v, field);
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

// Accepts 1e7 style input as long as the value is a whole number.
std::size_t parse_count(const json& v, const std::string& field, std::size_t min = 1) {
  const double d = finite_number(v, field);
  if (d != std::floor(d) || d < static_cast<double>(min) || d > 9.007199254740992e15)
    fail(field, "must be an integer >= " + std::to_string(min));
  return static_cast<std::size_t>(d);
}

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
      try {
        return std::stoull(s);
      } catch (const std::exception&) {
      }
    }
  }
  fail("seed", "must be a non-negative integer");
}

int parse_spin(const json& v, const std::string& field) {
  const double d = finite_number(v, field);
  if (d != 1.0 && d != -1.0) fail(field, "spin must be +1 or -1");
  return static_cast<int>(d);
}

std::vector<json> split_list(const json& v) {
  if (v.is_array()) return {v.begin(), v.end()};
  if (v.is_string()) {
    std::vector<json> items;
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) items.emplace_back(item);
    return items;
  }
  return {v};
}

std::vector<double> parse_grid(const json& v, const std::string& field) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(finite_number(item, field));
  if (out.empty()) fail(field, "grid must be non-empty");
  return out;
}

DisorderLaw parse_law(const json& j) {
  try {
    if (j["law"].is_object()) return DisorderLaw::from_json(j["law"]);
    if (!j["law"].is_string()) fail("law", "expected a kind name or an object");
    const double variance = j.contains("variance") ? finite_number(j["variance"], "variance") : 1.0;
    double p = std::numeric_limits<double>::infinity();
    if (j.contains("p") && !j["p"].is_null()) p = parse_number(j["p"], "p");
    const auto kind = j["law"].get<std::string>();
    if (kind == "pareto" && std::isinf(p)) fail("p", "required for pareto");
    return DisorderLaw::from_name(kind, variance, p);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    // the library names the law kind "kind"; the flag is --law
    const std::string msg = e.what();
    if (msg.rfind("kind:", 0) == 0) throw ValidationError("law:" + msg.substr(5));
    throw ValidationError(msg);
  }
}

bool stochastic(Command c) { return c != Command::Continuum; }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// A CSV table whose cells are JSON scalars, so the same rows serialise both ways.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        const auto& c = row[i];
        if (c.is_number_float()) out << format_number(c.get<double>());
        else if (c.is_string()) out << c.get<std::string>();
        else if (c.is_null()) out << "nan";
        else out << c.dump();
      }
      out << '\n';
    }
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json o;
      for (std::size_t i = 0; i < columns.size(); ++i) o[columns[i]] = row[i];
      arr.push_back(o);
    }
    return arr;
  }
};

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Outcome {
  Table table;
  json result;                   // JSON payload (rows by default)
  std::vector<std::string> notes;  // lines for the terminal after the CSV
  bool verified = true;
  std::optional<SweepResult> sweep;
};

Outcome run_fe(const RunConfig& c, bool flips) {
  ChainRunConfig rc{c.N, c.replicas, *c.seed, c.a, c.b, 1, flips};
  const auto totals = run_replicas(*c.law, c.J_grid, rc);
  const double n = static_cast<double>(c.N);
  Outcome o;
  o.table.columns = flips ? std::vector<std::string>{"J", "density", "stderr", "flip_coeff"}
                          : std::vector<std::string>{"J", "F_hat", "stderr", "N", "replicas"};
  for (std::size_t j = 0; j < c.J_grid.size(); ++j) {
    std::vector<double> v(c.replicas);
    for (std::size_t r = 0; r < c.replicas; ++r)
      v[r] = flips ? -0.5 * totals[r][j].dlog_z / n : totals[r][j].log_z / n;
    const auto e = mean_with_stderr(v);
    const double J = c.J_grid[j];
    if (flips)
      o.table.rows.push_back({num(J), num(e.value), num(e.std_error), num(4.0 * J * J * e.value)});
    else
      o.table.rows.push_back({num(J), num(e.value), num(e.std_error), json(c.N), json(c.replicas)});
  }
  return o;
}

Outcome run_continuum(const RunConfig& c) {
  Outcome o;
  o.table.columns = {"J", "x", "F_exact", "F_asym", "gap"};
  for (double J : c.J_grid) {
    const auto e = continuum_free_energy(J);
    o.table.rows.push_back({num(J), num(e.x), num(e.F_exact), num(e.F_asym), num(e.gap)});
  }
  return o;
}

Outcome run_w1(const RunConfig& c) {
  Outcome o;
  o.table.columns = {"L", "w1", "stderr"};
  const auto curve = w1_clt_curve(*c.law, c.L, c.samples, *c.seed);
  for (const auto& pt : curve) o.table.rows.push_back({json(pt.L), num(pt.w1), num(pt.std_error)});
  return o;
}

Outcome run_verify_bounds(const RunConfig& c) {
  const std::size_t L = c.L.front();
  const double J = c.J_grid.front();
  const double M = *c.M;
  std::vector<std::pair<int, int>> pairs;
  if (c.all_boundaries) pairs = {{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}};
  else pairs = {{c.a, c.b}};

  const std::size_t per_trial = pairs.size() * 3;
  std::vector<BlockBoundReport> reports(c.trials * per_trial);
  parallel_for(c.trials, [&](std::size_t t) {
    FieldSampler sampler(*c.law, *c.seed, t);
    std::vector<double> h(L);
    sampler.fill(h);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto r = verify_block_bounds(h, J, M, pairs[k].first, pairs[k].second);
      std::copy(r.begin(), r.end(), reports.begin() + static_cast<std::ptrdiff_t>(t * per_trial + 3 * k));
    }
  });

  std::size_t trials_passed = 0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    bool ok = true;
    for (std::size_t i = 0; i < per_trial; ++i) ok = ok && reports[t * per_trial + i].pass;
    trials_passed += ok;
  }

  Outcome o;
  o.table.columns = {"inequality", "a", "b", "checked", "passed", "min_slack"};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (std::size_t q = 0; q < 3; ++q) {
      std::size_t passed = 0;
      double min_slack = std::numeric_limits<double>::infinity();
      InequalityId id{};
      for (std::size_t t = 0; t < c.trials; ++t) {
        const auto& r = reports[t * per_trial + 3 * k + q];
        id = r.inequality_id;
        passed += r.pass;
        min_slack = std::min(min_slack, r.slack);
      }
      o.table.rows.push_back({json(std::string(to_string(id))), json(pairs[k].first),
                              json(pairs[k].second), json(c.trials), json(passed), num(min_slack)});
    }
  }
  o.verified = trials_passed == c.trials;
  o.notes.push_back(std::to_string(trials_passed) + "/" + std::to_string(c.trials) + " pass");
  return o;
}

Outcome run_sweep(const RunConfig& c) {
  Outcome o;
  o.sweep = leading_coefficient_sweep(*c.law, c.J_grid, c.N, c.replicas, *c.seed, true);
  o.result = to_json(*o.sweep);
  return o;
}

Outcome run_sandwich(const RunConfig& c) {
  SandwichConfig sc{c.N, c.replicas, *c.seed, c.grid, c.blocks, c.M};
  const auto rows = sandwich_test_gaussian(c.J_grid, sc);
  Outcome o;
  o.table.columns = {"J", "M", "F_hat", "stderr", "lower", "upper", "lower_pass", "upper_pass"};
  std::size_t passed = 0;
  for (const auto& r : rows) {
    o.table.rows.push_back({num(r.J), num(r.M), num(r.F_hat.value), num(r.F_hat.std_error),
                            num(r.lower.value), num(r.upper.value), json(r.lower_pass),
                            json(r.upper_pass)});
    passed += r.pass();
  }
  o.verified = passed == rows.size();
  o.notes.push_back(std::to_string(passed) + "/" + std::to_string(rows.size()) + " pass");
  return o;
}

void validate(const RunConfig& c) {
  if (stochastic(c.command) && !c.seed) fail("seed", "required for " + std::string(to_string(c.command)));
  const bool needs_law = c.command != Command::Continuum && c.command != Command::Sandwich;
  if (needs_law && !c.law) fail("law", "required for " + std::string(to_string(c.command)));
  if (c.command == Command::Sandwich && c.law && !(*c.law == DisorderLaw::gaussian(1.0)))
    fail("law", "sandwich runs on the standard Gaussian only");
  if (c.command != Command::W1 && c.J_grid.empty()) fail("J", "required");
  if (c.replicas < 2 && stochastic(c.command)) fail("replicas", "must be >= 2");

  switch (c.command) {
    case Command::Fe:
    case Command::Flips:
    case Command::Sweep:
    case Command::Sandwich:
      if (c.N < kMinFreeEnergyChain) fail("N", "must be >= " + std::to_string(kMinFreeEnergyChain));
      break;
    default:
      break;
  }
  if (c.command == Command::Sweep) {
    if (c.J_grid.size() < 3) fail("J_grid", "need at least 3 points");
    for (std::size_t i = 1; i < c.J_grid.size(); ++i)
      if (!(c.J_grid[i] > c.J_grid[i - 1])) fail("J_grid", "must be increasing");
  }
  if (c.command == Command::VerifyBounds) {
    if (c.L.size() != 1) fail("L", "verify-bounds takes a single block length");
    if (c.J_grid.size() != 1) fail("J", "verify-bounds takes a single J");
    if (c.J_grid.front() < 0.0) fail("J", "must be >= 0");
    if (!c.M) fail("M", "required for verify-bounds");
    if (!(*c.M >= 0.0)) fail("M", "must be >= 0");
  }
  if (c.command == Command::Sandwich) {
    for (double J : c.J_grid)
      if (!c.M && !(J > 1.0)) fail("J", "sandwich threshold needs J > 1");
    if (c.grid < 2) fail("G", "must be >= 2");
  }
  if (c.command == Command::W1 && c.samples < 2) fail("n", "must be >= 2");
}

void write_text(const std::string& path, const std::string& text, const std::string& field) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(field, "cannot open '" + path + "' for writing");
  f << text;
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "unknown";
}

Command command_from_string(std::string_view name) {
  for (const auto& [cmd, n] : kCommands)
    if (n == name) return cmd;
  fail("command", "unknown command '" + std::string(name) + "'");
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::json RunConfig::canonical() const {
  nlohmann::json j{{"command", std::string(to_string(command))},
         {"J_grid", J_grid},
         {"N", N},
         {"replicas", replicas},
         {"a", a},
         {"b", b},
         {"all_boundaries", all_boundaries},
         {"L", L},
         {"trials", trials},
         {"samples", samples},
         {"G", grid},
         {"blocks", blocks}};
  j["law"] = law ? law->to_json() : nlohmann::json(nullptr);
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  j["M"] = M ? nlohmann::json(*M) : nlohmann::json(nullptr);
  return j;
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical().dump()); }

std::string header_line(const RunConfig& config) {
  return "# rfic " + std::string(to_string(config.command)) + " config_hash=" + hex64(config.hash()) +
         " seed=" + (config.seed ? std::to_string(*config.seed) : std::string("none"));
}

RunConfig config_from_json(Command command, const json& j) {
  if (!j.is_object()) fail("config", "expected a JSON object");
  RunConfig c;
  c.command = command;
  if (command == Command::W1) c.L = {1, 4, 16, 64};

  if (j.contains("law")) c.law = parse_law(j);
  else if (j.contains("variance") || j.contains("p")) fail("law", "variance/p given without a law");

  if (j.contains("J") && j.contains("J_grid")) fail("J", "give either J or J_grid");
  if (j.contains("J")) c.J_grid = parse_grid(j["J"], "J");
  if (j.contains("J_grid")) c.J_grid = parse_grid(j["J_grid"], "J_grid");
  if (j.contains("N")) c.N = parse_count(j["N"], "N");
  if (j.contains("replicas")) c.replicas = parse_count(j["replicas"], "replicas");
  if (j.contains("seed")) c.seed = parse_seed(j["seed"]);
  if (j.contains("a") || j.contains("b")) {
    c.all_boundaries = false;
    if (j.contains("a")) c.a = parse_spin(j["a"], "a");
    if (j.contains("b")) c.b = parse_spin(j["b"], "b");
  }
  if (j.contains("L")) {
    c.L.clear();
    for (const auto& item : split_list(j["L"])) c.L.push_back(parse_count(item, "L"));
  }
  if (j.contains("M")) c.M = finite_number(j["M"], "M");
  if (j.contains("trials")) c.trials = parse_count(j["trials"], "trials");
  if (j.contains("n")) c.samples = parse_count(j["n"], "n");
  if (j.contains("G")) c.grid = parse_count(j["G"], "G");
  if (j.contains("blocks")) c.blocks = parse_count(j["blocks"], "blocks");
  if (j.contains("out")) c.out = j["out"].get<std::string>();
  if (j.contains("json")) c.json = j["json"].get<std::string>();
  if (j.contains("svg")) c.svg = j["svg"].get<std::string>();
  validate(c);
  return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Outcome o;
  try {
    validate(config);
    switch (config.command) {
      case Command::Fe: o = run_fe(config, false); break;
      case Command::Flips: o = run_fe(config, true); break;
      case Command::Continuum: o = run_continuum(config); break;
      case Command::W1: o = run_w1(config); break;
      case Command::VerifyBounds: o = run_verify_bounds(config); break;
      case Command::Sweep: o = run_sweep(config); break;
      case Command::Sandwich: o = run_sandwich(config); break;
    }

    const std::string header = header_line(config);
    std::ostringstream csv;
    csv << header << '\n';
    if (o.sweep) write_sweep_csv(csv, *o.sweep);
    else o.table.write_csv(csv);

    if (config.out) write_text(*config.out, csv.str(), "out");
    else out << csv.str();

    if (config.json) {
      json doc{{"command", std::string(to_string(config.command))},
               {"config_hash", hex64(config.hash())},
               {"seed", config.seed ? json(*config.seed) : json(nullptr)},
               {"config", config.canonical()},
               {"verified", o.verified}};
      doc["result"] = o.sweep ? o.result : o.table.to_json();
      write_text(*config.json, doc.dump(2) + "\n", "json");
    }

    if (config.svg) {
      std::ostringstream svg;
      if (o.sweep) {
        const auto& s = *o.sweep;
        const double v = s.law.variance();
        write_svg_line_chart(svg, header.substr(2), "J", "rescaled estimate",
                             {{"2J F", s.J_grid, s.coeff},
                              {"4J^2 flips", s.J_grid, s.flip_coeff},
                              {"variance", s.J_grid, std::vector<double>(s.J_grid.size(), v)}});
      } else {
        // first column against every other numeric column
        std::vector<SvgSeries> series;
        for (std::size_t k = 1; k < o.table.columns.size(); ++k) {
          SvgSeries s{o.table.columns[k], {}, {}};
          for (const auto& row : o.table.rows) {
            if (!row[0].is_number() || !row[k].is_number()) continue;
            s.x.push_back(row[0].get<double>());
            s.y.push_back(row[k].get<double>());
          }
          if (!s.x.empty()) series.push_back(std::move(s));
        }
        write_svg_line_chart(svg, header.substr(2), o.table.columns.front(), "value", series);
      }
      write_text(*config.svg, svg.str(), "svg");
    }

    for (const auto& line : o.notes) out << line << '\n';
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return o.verified ? kExitOk : kExitVerification;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random field Ising chain numerical lab"};
  app.require_subcommand(1);

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static constexpr Flag kFlags[] = {
      {"--law", "law", "gaussian | rademacher | uniform | expdiff | pareto"},
      {"--variance", "variance", "theta^2 (default 1)"},
      {"--p", "p", "moment order for pareto"},
      {"--J", "J", "coupling, or comma separated list"},
      {"--J-grid", "J_grid", "comma separated couplings"},
      {"--N", "N", "chain length (1e7 style accepted)"},
      {"--replicas", "replicas", "independent chains"},
      {"--seed", "seed", "RNG seed"},
      {"--a", "a", "left boundary spin"},
      {"--b", "b", "right boundary spin"},
      {"--L", "L", "block length (comma list for w1)"},
      {"--M", "M", "threshold"},
      {"--trials", "trials", "verify-bounds realisations"},
      {"--n", "n", "w1 sample size"},
      {"--G", "G", "Brownian grid size"},
      {"--blocks", "blocks", "Brownian blocks"},
      {"--out", "out", "CSV path (default stdout)"},
      {"--json", "json", "JSON path"},
      {"--svg", "svg", "SVG chart path"},
  };

  std::map<std::string, std::string> values;
  std::string config_path;
  std::vector<CLI::App*> subs;
  for (const auto& [cmd, name] : kCommands) {
    auto* sub = app.add_subcommand(std::string(name));
    for (const auto& f : kFlags) sub->add_option(f.name, values[std::string(f.name) + "@" + std::string(name)], f.help);
    sub->add_option("--config", config_path, "JSON config file; flags override it");
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    std::size_t idx = 0;
    while (!subs[idx]->parsed()) ++idx;
    const auto* sub = subs[idx];
    const std::string name(kCommands[idx].second);
    const Command command = kCommands[idx].first;

    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) fail("config", "cannot read '" + config_path + "'");
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        fail("config", std::string("invalid JSON: ") + e.what());
      }
      if (!j.is_object()) fail("config", "expected a JSON object");
      if (j.contains("command") && j["command"] != name)
        fail("command", "config file is for '" + j["command"].get<std::string>() + "'");
      j.erase("command");
    }
    for (const auto& f : kFlags) {
      if (sub->count(f.name) == 0) continue;
      const std::string& v = values[std::string(f.name) + "@" + name];
      if (std::string_view(f.key) == "J" || std::string_view(f.key) == "J_grid") {
        j.erase("J");
        j.erase("J_grid");
      }
      if (std::string_view(f.key) == "law" && j.contains("law") && j["law"].is_object()) j.erase("law");
      j[f.key] = v;
    }
    const RunConfig config = config_from_json(command, j);
    return run(config, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace rfic::cli

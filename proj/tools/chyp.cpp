// chyp: build, verify and export amalgamated surface-group representations.

#include "chyp/config.hpp"
#include "chyp/maskit.hpp"
#include "chyp/png.hpp"
#include "chyp/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>

using namespace chyp;
namespace fs = std::filesystem;

namespace {

enum Exit { kPass = 0, kViolation = 1, kConfigError = 2 };

struct Outcome {
  Json body;
  bool passed = true;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw detail::io_error("cannot open", p.string());
  f << text;
  if (!f) throw detail::io_error("cannot write", p.string());
}

AmalgamRep build_or_config_error(const RunConfig& c) {
  try {
    return build(c.build_options());
  } catch (const SeparationError& e) {
    throw ConfigError(e.what());
  }
}

Outcome cmd_build(const RunConfig& c) {
  const AmalgamRep rep = build_or_config_error(c);
  Outcome o;
  o.body = to_json(rep);
  // relative to the squared entry size: the embedding is quadratic in the generators
  double worst = 0.0, worst_rel = 0.0;
  for (const Factor& f : rep.factors)
    for (const Isometry& g : f.images) {
      const double res = g.unitarity_residual(), scale = std::max(1.0, max_abs(g.matrix()));
      worst = std::max(worst, res);
      worst_rel = std::max(worst_rel, res / (scale * scale));
    }
  o.body["max_unitarity_residual"] = json_number(worst);
  o.body["max_relative_unitarity_residual"] = json_number(worst_rel);
  o.passed = worst_rel <= kUnitarityTol;
  return o;
}

Outcome cmd_verify(const RunConfig& c) {
  const AmalgamRep rep = build_or_config_error(c);
  std::vector<VerificationReport> reports;
  reports.push_back(check_precisely_invariant(rep, 0, c.word_length, c.samples, c.seed));
  reports.push_back(check_precisely_invariant(rep, 1, c.word_length, c.samples, c.seed));
  reports.push_back(check_interactive_pair(rep, c.word_length, c.samples, c.seed));
  reports.push_back(check_fundamental_set(rep, fundamental_region(0), 0, c.fundamental_word_length,
                                          c.fundamental_samples, c.seed, c.coverage_samples));
  reports.push_back(check_fundamental_set(rep, fundamental_region(1), 1, c.fundamental_word_length,
                                          c.fundamental_samples, c.seed, c.coverage_samples));
  reports.push_back(check_fundamental_set(rep, phi(), -1, c.fundamental_word_length, c.phi_samples, c.seed,
                                          c.coverage_samples));
  reports.push_back(nonidentity_words(rep, c.nonidentity_word_length, c.seed, 100000, c.nonidentity_tol));
  reports.push_back(parabolic_census(rep, c.census_word_length, nullptr, c.seed));

  Outcome o;
  Json list = Json::array();
  for (const VerificationReport& r : reports) {
    Json j = to_json(r);
    const bool ok = r.passed() && r.undecided_fraction() < c.undecided_max + 1e-15;
    j["passed"] = ok;
    o.passed = o.passed && ok;
    list.push_back(j);
  }
  o.body["reports"] = list;
  o.body["passed"] = o.passed;
  return o;
}

Outcome cmd_toledo(const RunConfig& c, const fs::path& out) {
  const AmalgamRep rep = build_or_config_error(c);
  const KahlerForm form = calibrate();
  ToledoOptions opt;
  opt.ns = c.mesh_ns;
  opt.nxi = c.mesh_nxi;
  const ToledoResult t = toledo_invariant(rep, form, opt);
  const SubdivisionResult s = subdivision_test(rep, form, c.subdivision_n, opt);

  std::ostringstream csv;
  write_pieces_csv(csv, s);
  const fs::path csv_path = out / "toledo_pieces.csv";
  write_text(csv_path, csv.str());

  const bool covers = std::abs(t.tau) <= t.error;
  const double sum_gap = std::abs(s.total - t.integral);
  const bool sums = sum_gap <= s.total_error + 2.0 * kPi * t.error;
  Outcome o;
  o.body["kahler_lambda"] = form.lambda;
  o.body["toledo"] = to_json(t);
  o.body["subdivision"] = to_json(s);
  o.body["subdivision"]["sum_minus_integral"] = json_number(s.total - t.integral);
  o.body["pieces_csv"] = csv_path.filename().string();
  o.body["error_bar_covers_zero"] = covers;
  o.passed = std::abs(t.tau) < c.toledo_tol && covers && s.max_relative_spread() <= c.subdivision_tol && sums;
  o.body["passed"] = o.passed;
  return o;
}

Outcome cmd_limitset(const RunConfig& c, const fs::path& out) {
  const AmalgamRep rep = build_or_config_error(c);
  const OrbitCloud cloud = orbit_boundary(rep, c.limitset_word_length);
  const fs::path csv = out / "limitset.csv";
  write_cloud_csv(csv.string(), cloud);
  Outcome o;
  o.body["word_length"] = c.limitset_word_length;
  o.body["points"] = cloud.points.size();
  o.body["infinity_words"] = cloud.infinity_words;
  o.body["rejected"] = cloud.rejected;
  o.body["max_boundary_residual"] = json_number(cloud.max_residual);
  o.body["csv"] = csv.filename().string();
  if (c.limitset_png) {
    const fs::path png = out / "limitset.png";
    write_cloud_png(png.string(), cloud);
    o.body["png"] = png.filename().string();
  }
  o.passed = cloud.rejected == 0;
  return o;
}

Outcome cmd_classify(const RunConfig& c, const std::string& text) {
  const AmalgamRep rep = build_or_config_error(c);
  Word w;
  try {
    w = rep.presentation.parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("word: ") + e.what());
  }
  const Isometry g = rep.rho(w);
  // conjugate words have the same kind; the reduced one is computed more accurately
  const Word core = cyclic_reduce(w);
  const IsometryKind k = classify(rep.rho(core));
  const NormalForm nf = normal_form(rep.presentation, w);
  Outcome o;
  o.body["word"] = to_string(w);
  o.body["cyclic_reduction"] = to_string(core);
  o.body["kind"] = to_string(k.kind);
  o.body["trace"] = to_json(k.trace);
  o.body["discriminant"] = json_number(k.discriminant);
  o.body["normal_form"] = to_string(nf.word());
  const auto p = nf.d_power();
  o.body["d_power"] = p ? Json(*p) : Json(nullptr);
  o.body["matrix"] = to_json(g.matrix());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface-group representations into PU(2,1): construction and numerical verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--out", out_dir, "output directory");
  std::map<std::string, std::string> overrides;
  for (const std::string& key : config_keys()) {
    if (key == "seed" || key == "output_dir") continue;
    app.add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, "override config key " + key);
  }

  auto* build_cmd = app.add_subcommand("build", "construct the representation and print a summary");
  auto* verify_cmd = app.add_subcommand("verify", "run every verification check");
  auto* toledo_cmd = app.add_subcommand("toledo", "Toledo invariant and subdivision test");
  auto* limit_cmd = app.add_subcommand("limitset", "orbit of infinity as CSV and PNG");
  auto* classify_cmd = app.add_subcommand("classify", "classify the image of a word");
  std::string word;
  classify_cmd->add_option("word", word, "whitespace-separated letters, e.g. \"a1 b1 a1^-1 b1^-1\" or gamma")
      ->required();
  for (auto* s : {build_cmd, verify_cmd, toledo_cmd, limit_cmd, classify_cmd}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& [key, value] : overrides) set_config_value(cfg, key, value, "--" + key + ": ");
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "chyp: " << e.what() << "\n";
    return kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const fs::path out = cfg.output_dir;
  Outcome result;
  try {
    fs::create_directories(out);
    if (command == "build")
      result = cmd_build(cfg);
    else if (command == "verify")
      result = cmd_verify(cfg);
    else if (command == "toledo")
      result = cmd_toledo(cfg, out);
    else if (command == "limitset")
      result = cmd_limitset(cfg, out);
    else
      result = cmd_classify(cfg, word);
  } catch (const ConfigError& e) {
    std::cerr << "chyp: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "chyp: " << command << ": " << e.what() << "\n";
    return kViolation;
  }

  Json doc;
  doc["generated_at"] = utc_timestamp();
  doc["command"] = command;
  doc["config"] = to_json(cfg);
  doc["result"] = result.body;
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  try {
    write_text(out / (command + ".json"), text);
  } catch (const std::exception& e) {
    std::cerr << "chyp: " << e.what() << "\n";
    return kViolation;
  }
  return result.passed ? kPass : kViolation;
}

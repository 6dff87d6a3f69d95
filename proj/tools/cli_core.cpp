#include "cli_core.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "openkz/analytic.hpp"
#include "openkz/errors.hpp"
#include "openkz/liouvillian.hpp"
#include "openkz/scaling.hpp"

namespace openkz::cli {

using nlohmann::json;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError(path + key + ": unknown field");
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  return j;
}

double number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + key + ": must be finite");
  return x;
}

int integer(const json& obj, const std::string& key, const std::string& path, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + key + ": expected an integer");
  return v.get<int>();
}

std::string text(const json& obj, const std::string& key, const std::string& path,
                 const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path + key + ": expected a string");
  return v.get<std::string>();
}

ModelSpec parse_model(const json& j) {
  require_object(j, "model");
  const std::string type = text(j, "type", "model.", "rice_mele");
  if (type == "rice_mele") {
    reject_unknown(j, "model.", {"type", "v", "w"});
    return rice_mele(number(j, "v", "model.", 1.0), number(j, "w", "model.", -1.0));
  }
  if (type == "shockley") {
    reject_unknown(j, "model.", {"type", "v", "w"});
    return shockley(number(j, "v", "model.", 0.5), number(j, "w", "model.", 0.5));
  }
  if (type == "haldane") {
    reject_unknown(j, "model.", {"type", "t1", "t2", "phi"});
    return haldane(number(j, "t1", "model.", 1.0), number(j, "t2", "model.", 0.5),
                   number(j, "phi", "model.", std::numbers::pi / 2.0));
  }
  throw ConfigError("model.type: unknown model '" + type + "' (rice_mele, shockley, haldane)");
}

json model_to_json(const ModelSpec& m) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RiceMele>) return {{"type", "rice_mele"}, {"v", p.v}, {"w", p.w}};
        if constexpr (std::is_same_v<T, Shockley>) return {{"type", "shockley"}, {"v", p.v}, {"w", p.w}};
        if constexpr (std::is_same_v<T, Haldane>)
          return {{"type", "haldane"}, {"t1", p.t1}, {"t2", p.t2}, {"phi", p.phi}};
      },
      m.variant);
}

DissipationConfig parse_dissipation(const json& j) {
  require_object(j, "dissipation");
  reject_unknown(j, "dissipation.", {"gamma_a", "gamma_b", "gamma", "delta"});
  const bool rates = j.contains("gamma_a") || j.contains("gamma_b");
  const bool sums = j.contains("gamma") || j.contains("delta");
  if (rates && sums) {
    throw ConfigError("dissipation: give either (gamma_a, gamma_b) or (gamma, delta), not both");
  }
  if (sums) {
    const double g = number(j, "gamma", "dissipation.", 0.0);
    const double d = number(j, "delta", "dissipation.", 0.0);
    if (g < 0.0) throw ConfigError("dissipation.gamma: must be nonnegative");
    if (std::abs(d) > g) throw ConfigError("dissipation.delta: |delta| must not exceed gamma");
    return {0.5 * (g + d), 0.5 * (g - d)};
  }
  return {number(j, "gamma_a", "dissipation.", 0.0), number(j, "gamma_b", "dissipation.", 0.0)};
}

Variant parse_variant(const std::string& s, const std::string& field) {
  if (s == "full") return Variant::full;
  if (s == "no_jump") return Variant::no_jump;
  throw ConfigError(field + ": expected 'full' or 'no_jump', got '" + s + "'");
}

Observable parse_observable(const std::string& s) {
  for (Observable o : {Observable::n, Observable::n_total, Observable::n_a, Observable::n_b}) {
    if (observable_name(o) == s) return o;
  }
  throw ConfigError("fit: unknown observable '" + s + "' (n, N_total, N_a, N_b)");
}

template <class F>
void translate_errors(const std::string& field, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

bool is_reference_rice_mele(const ModelSpec& m) {
  const auto* rm = std::get_if<RiceMele>(&m.variant);
  return rm && rm->v == 1.0 && rm->w == -1.0;
}

json fit_to_json(const FitResult& f) {
  return {{"exponent", f.exponent},           {"prefactor", f.prefactor},
          {"exponent_stderr", f.exponent_stderr}, {"window", {f.window.first, f.window.second}},
          {"r_squared", f.r_squared},         {"points", f.points}};
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& filename) {
  return std::filesystem::path(cfg.out_dir) / filename;
}

}  // namespace

void RunConfig::validate() const {
  if (name.empty() || name.find('/') != std::string::npos) {
    throw ConfigError("name: must be a nonempty file stem without '/'");
  }
  translate_errors("model", [&] { setup.model.validate(); });
  translate_errors("protocol", [&] { setup.protocol.validate(); });
  translate_errors("dissipation", [&] { setup.dissipation.validate(); });
  translate_errors("integrator", [&] { setup.integrator.validate(); });
  if (setup.grid_size < 2) throw ConfigError("grid: the momentum grid needs at least 2 points per dimension");
  if (setup.workers < 0) throw ConfigError("workers: must be nonnegative");
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!(sweep[i] > 0.0)) throw ConfigError("sweep[" + std::to_string(i) + "]: tau_Q must be positive");
    if (i > 0 && !(sweep[i] > sweep[i - 1])) {
      throw ConfigError("sweep[" + std::to_string(i) + "]: tau_Q list must be strictly ascending");
    }
  }
  for (const std::string& o : fit_observables) parse_observable(o);
  if (scan.points < 2) throw ConfigError("liouvillian.points: need at least 2");
  if (!(scan.u_max > scan.u_min)) throw ConfigError("liouvillian.u_max: must exceed u_min");
}

json RunConfig::to_json() const {
  const auto& s = setup;
  return {{"name", name},
          {"model", model_to_json(s.model)},
          {"protocol", {{"u_i", s.protocol.u_i}, {"u_f", s.protocol.u_f}, {"tau_q", s.protocol.tau_q}}},
          {"dissipation", {{"gamma_a", s.dissipation.gamma_a}, {"gamma_b", s.dissipation.gamma_b}}},
          {"grid", s.grid_size},
          {"integrator",
           {{"rtol", s.integrator.rtol},
            {"atol", s.integrator.atol},
            {"max_step", s.integrator.max_step},
            {"samples", s.integrator.sample_count}}},
          {"variant", s.variant == Variant::full ? "full" : "no_jump"},
          {"initial_state", s.init == InitialStateMode::exact_ground_state ? "ground_state" : "b_polarized"},
          {"sweep", sweep},
          {"fit", fit_observables},
          {"liouvillian",
           {{"q", {scan.q.x, scan.q.y}}, {"u_min", scan.u_min}, {"u_max", scan.u_max}, {"points", scan.points}}},
          {"workers", s.workers},
          {"out", out_dir}};
}

RunConfig parse_config(const json& doc) {
  require_object(doc, "config");
  reject_unknown(doc, "", {"name", "model", "protocol", "dissipation", "grid", "integrator", "variant",
                           "initial_state", "sweep", "fit", "liouvillian", "workers", "out"});
  RunConfig cfg;
  cfg.source = doc;
  cfg.name = text(doc, "name", "", "run");
  if (doc.contains("model")) cfg.setup.model = parse_model(doc.at("model"));
  if (doc.contains("protocol")) {
    const json& p = require_object(doc.at("protocol"), "protocol");
    reject_unknown(p, "protocol.", {"u_i", "u_f", "tau_q"});
    cfg.setup.protocol = {number(p, "u_i", "protocol.", 2.0), number(p, "u_f", "protocol.", -2.0),
                          number(p, "tau_q", "protocol.", 50.0)};
  }
  if (doc.contains("dissipation")) cfg.setup.dissipation = parse_dissipation(doc.at("dissipation"));
  cfg.setup.grid_size = integer(doc, "grid", "", default_grid_size(cfg.setup.model));
  cfg.setup.integrator.sample_count = 201;
  if (doc.contains("integrator")) {
    const json& i = require_object(doc.at("integrator"), "integrator");
    reject_unknown(i, "integrator.", {"rtol", "atol", "max_step", "samples"});
    auto& ic = cfg.setup.integrator;
    ic.rtol = number(i, "rtol", "integrator.", ic.rtol);
    ic.atol = number(i, "atol", "integrator.", ic.atol);
    ic.max_step = number(i, "max_step", "integrator.", ic.max_step);
    ic.sample_count = integer(i, "samples", "integrator.", ic.sample_count);
  }
  cfg.setup.variant = parse_variant(text(doc, "variant", "", "full"), "variant");
  const std::string init = text(doc, "initial_state", "", "ground_state");
  if (init == "ground_state") {
    cfg.setup.init = InitialStateMode::exact_ground_state;
  } else if (init == "b_polarized") {
    cfg.setup.init = InitialStateMode::b_polarized;
  } else {
    throw ConfigError("initial_state: expected 'ground_state' or 'b_polarized'");
  }
  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    if (!s.is_array()) throw ConfigError("sweep: expected an array of tau_Q values");
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!s[k].is_number()) throw ConfigError("sweep[" + std::to_string(k) + "]: expected a number");
      cfg.sweep.push_back(s[k].get<double>());
    }
  }
  if (doc.contains("fit")) {
    const json& f = doc.at("fit");
    if (!f.is_array()) throw ConfigError("fit: expected an array of observable names");
    cfg.fit_observables.clear();
    for (const json& o : f) {
      if (!o.is_string()) throw ConfigError("fit: observable names must be strings");
      cfg.fit_observables.push_back(o.get<std::string>());
    }
  }
  if (doc.contains("liouvillian")) {
    const json& l = require_object(doc.at("liouvillian"), "liouvillian");
    reject_unknown(l, "liouvillian.", {"q", "u_min", "u_max", "points"});
    if (l.contains("q")) {
      const json& q = l.at("q");
      if (!q.is_array() || q.empty() || q.size() > 2 || !q[0].is_number() ||
          (q.size() == 2 && !q[1].is_number())) {
        throw ConfigError("liouvillian.q: expected [qx] or [qx, qy]");
      }
      cfg.scan.q = {q[0].get<double>(), q.size() == 2 ? q[1].get<double>() : 0.0};
    }
    cfg.scan.u_min = number(l, "u_min", "liouvillian.", cfg.scan.u_min);
    cfg.scan.u_max = number(l, "u_max", "liouvillian.", cfg.scan.u_max);
    cfg.scan.points = integer(l, "points", "liouvillian.", cfg.scan.points);
  }
  cfg.setup.workers = integer(doc, "workers", "", 0);
  cfg.out_dir = text(doc, "out", "", ".");
  return cfg;
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.workers) cfg.setup.workers = *o.workers;
  if (o.variant) cfg.setup.variant = parse_variant(*o.variant, "--variant");
  if (o.grid) cfg.setup.grid_size = *o.grid;
}

RunConfig load_config(const std::string& path, const Overrides& overrides) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config: cannot open '" + path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("--config: invalid JSON: " + std::string(e.what()));
    }
  }
  RunConfig cfg = parse_config(doc);
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

ManifestWriter::ManifestWriter(const RunConfig& cfg, std::string command)
    : cfg_(cfg), command_(std::move(command)), started_(now_seconds()) {
  std::filesystem::create_directories(cfg_.out_dir);
}

void ManifestWriter::write_file(const std::string& filename, const std::string& contents) {
  const auto path = out_path(cfg_, filename);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  files_.push_back({{"file", filename}, {"bytes", contents.size()}, {"sha256", sha256_hex(contents)}});
}

void ManifestWriter::phase(const std::string& name, double seconds) { phases_[name] = seconds; }

void ManifestWriter::note(const std::string& key, json value) { extra_[key] = std::move(value); }

std::string ManifestWriter::finish() {
  json m = {{"artifact_version", kArtifactVersion},
            {"command", command_},
            {"config", cfg_.to_json()},
            {"workers_resolved", resolve_workers(cfg_.setup.workers)},
            {"wall_seconds", now_seconds() - started_},
            {"phases", phases_},
            {"files", files_}};
  for (auto& [k, v] : extra_.items()) m[k] = v;
  const std::string filename = cfg_.name + ".manifest.json";
  std::ofstream out(out_path(cfg_, filename), std::ios::binary);
  out << m.dump(2) << '\n';
  return filename;
}

CsvTable quench_table(const RunConfig& cfg, const ObservableSeries& series) {
  CsvTable t;
  t.header = {"t", "u", "n", "N_total", "N_a", "N_b", "trace"};
  for (const ObservablePoint& p : series.points) {
    t.rows.push_back({p.axis, cfg.setup.protocol.u_at(p.axis), p.n, p.n_total, p.n_a, p.n_b, p.trace});
  }
  return t;
}

CsvTable sweep_table(const RunConfig& cfg, const ObservableSeries& series) {
  const QuenchSetup& s = cfg.setup;
  const bool lld = s.dissipation.is_lld();
  const bool table = is_reference_rice_mele(s.model) && s.protocol.u_i > 0.0 && s.protocol.u_f < 0.0 &&
                     s.variant == Variant::full;
  const bool no_jump = is_reference_rice_mele(s.model) && s.protocol.u_i > 0.0 &&
                       s.protocol.u_f < 0.0 && s.variant == Variant::no_jump;
  CsvTable t;
  t.header = {"tau_Q", "n", "N_total", "N_a", "N_b"};
  if (lld) t.header.push_back("pred_N_scaling");
  if (table) {
    for (const char* c : {"pred_n_closed", "pred_N_total_closed", "pred_N_a_closed", "pred_N_b_closed"}) {
      t.header.push_back(c);
    }
  }
  if (no_jump) t.header.push_back("pred_n_no_jump");
  for (const ObservablePoint& p : series.points) {
    QuenchProtocol proto = s.protocol;
    proto.tau_q = p.axis;
    std::vector<double> row{p.axis, p.n, p.n_total, p.n_a, p.n_b};
    if (lld) row.push_back(kz_prediction(s.model, proto, s.dissipation).value(p.axis));
    if (table) {
      const FermionDensities fd = fermion_density_closed_form(proto, s.dissipation);
      row.insert(row.end(), {n_closed_form(proto, s.dissipation), fd.total, fd.a, fd.b});
    }
    if (no_jump) row.push_back(no_jump_n(proto, s.dissipation));
    t.rows.push_back(std::move(row));
  }
  return t;
}

int cmd_quench(const RunConfig& cfg) {
  ManifestWriter manifest(cfg, "quench");
  const double t0 = now_seconds();
  ObservableSeries series;
  try {
    series = run_quench(cfg.setup);
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    manifest.note("failure", e.what());
    manifest.finish();
    return numerical_failure;
  }
  manifest.phase("integrate", now_seconds() - t0);
  manifest.note("unique_modes", series.metadata.unique_modes);
  const double t1 = now_seconds();
  manifest.write_file(cfg.name + ".csv", quench_table(cfg, series).render());
  manifest.phase("write", now_seconds() - t1);
  manifest.finish();
  return ok;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.sweep.empty()) {
    std::cerr << "config error: sweep: list of tau_Q values is empty\n";
    return config_error;
  }
  ManifestWriter manifest(cfg, "sweep");
  ObservableSeries series;
  series.axis = Axis::tau_q;
  json failures = json::array();
  const double t0 = now_seconds();
  for (double tau : cfg.sweep) {
    try {
      const ObservableSeries one = sweep(cfg.setup, {tau});
      series.points.push_back(one.points.front());
      series.metadata = one.metadata;
    } catch (const Error& e) {
      std::cerr << "tau_Q=" << format_double(tau) << ": " << e.what() << '\n';
      failures.push_back({{"tau_q", tau}, {"error", e.what()}});
    }
  }
  manifest.phase("integrate", now_seconds() - t0);

  const double t1 = now_seconds();
  json fit = json::object();
  for (const std::string& name : cfg.fit_observables) {
    try {
      fit[name] = fit_to_json(powerlaw_fit(series, parse_observable(name)));
    } catch (const Error& e) {
      fit[name] = {{"error", e.what()}};
    }
  }
  if (cfg.setup.dissipation.is_lld()) {
    try {
      const ScalingPrediction pred = kz_prediction(cfg.setup.model, cfg.setup.protocol, cfg.setup.dissipation);
      json corners = json::array();
      for (const auto& c : pred.corners) {
        const char* b = c.behaviour == CornerBehaviour::kz ? "KZ" : c.behaviour == CornerBehaviour::pkz ? "pKZ" : "none";
        corners.push_back({{"corner", c.label}, {"behaviour", b}, {"prefactor", c.prefactor}});
      }
      fit["prediction"] = {{"formula", pred.formula_id}, {"exponent", -pred.beta}, {"prefactor", pred.prefactor},
                           {"regime_warning", pred.regime_warning}, {"corners", corners}};
    } catch (const Error& e) {
      fit["prediction"] = {{"error", e.what()}};
    }
  }
  manifest.phase("fit", now_seconds() - t1);
  manifest.write_file(cfg.name + ".csv", sweep_table(cfg, series).render());
  manifest.write_file(cfg.name + ".fit.json", fit.dump(2) + "\n");
  manifest.note("failures", failures);
  manifest.finish();
  return failures.empty() ? ok : numerical_failure;
}

int cmd_liouvillian(const RunConfig& cfg) {
  ManifestWriter manifest(cfg, "liouvillian");
  CsvTable t;
  t.header = {"u", "dz", "abs_Delta"};
  for (const char* n : {"lambda0", "lambda1_plus", "lambda2_plus", "lambda2_minus", "lambda1_minus", "lambda3"}) {
    t.header.push_back(std::string("re_") + n);
    t.header.push_back(std::string("im_") + n);
  }
  t.header.insert(t.header.end(), {"gap", "gap_expansion"});
  const double t0 = now_seconds();
  try {
    for (int i = 0; i < cfg.scan.points; ++i) {
      const double u = cfg.scan.u_min + (cfg.scan.u_max - cfg.scan.u_min) * i / (cfg.scan.points - 1);
      const BlochVector b = bloch_vector(cfg.setup.model, cfg.scan.q, u);
      const SpectrumResult r = eigenvalues_closed_form(b, cfg.setup.dissipation);
      std::vector<double> row{u, b.dz, std::abs(b.delta())};
      for (const cplx& z : {r.lambda0, r.lambda1_plus, r.lambda2_plus, r.lambda2_minus, r.lambda1_minus, r.lambda3}) {
        row.push_back(z.real());
        row.push_back(z.imag());
      }
      row.push_back(spectral_gap(b, cfg.setup.dissipation));
      row.push_back(spectral_gap_expansion(b, cfg.setup.dissipation));
      t.rows.push_back(std::move(row));
    }
  } catch (const Error& e) {
    std::cerr << "liouvillian scan failed: " << e.what() << '\n';
    manifest.note("failure", e.what());
    manifest.finish();
    return numerical_failure;
  }
  manifest.phase("spectrum", now_seconds() - t0);
  manifest.write_file(cfg.name + ".csv", t.render());
  manifest.finish();
  return ok;
}

json report_to_json(const ValidationReport& report, ValidationLevel level) {
  json checks = json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"measured", std::isfinite(c.measured) ? json(c.measured) : json(nullptr)},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  }
  return {{"level", level == ValidationLevel::fast ? "fast" : "full"},
          {"passed", report.all_passed()},
          {"checks", checks}};
}

int cmd_validate(ValidationLevel level, const std::string& out_dir, int workers, const RhsFunction& rhs) {
  RunConfig cfg;
  cfg.name = level == ValidationLevel::fast ? "validate_fast" : "validate_full";
  cfg.out_dir = out_dir;
  cfg.setup.workers = workers;
  ManifestWriter manifest(cfg, "validate");
  ValidationOptions opt;
  opt.level = level;
  opt.rhs = rhs;
  opt.workers = workers;
  const double t0 = now_seconds();
  const ValidationReport report = run_validation(opt);
  manifest.phase("checks", now_seconds() - t0);
  const json doc = report_to_json(report, level);
  manifest.write_file(cfg.name + ".json", doc.dump(2) + "\n");
  manifest.finish();
  for (const CheckResult& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << format_double(c.measured)
              << " tol=" << format_double(c.tolerance) << '\n';
  }
  return report.all_passed() ? ok : validation_failure;
}

}  // namespace openkz::cli

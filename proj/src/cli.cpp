#include "levyou/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "levyou/burgers.hpp"
#include "levyou/cylnoise.hpp"
#include "levyou/errors.hpp"
#include "levyou/parallel.hpp"
#include "levyou/regularity.hpp"
#include "levyou/rng.hpp"
#include "levyou/spectral_ou.hpp"
#include "levyou/stats.hpp"
#include "levyou/subordinator.hpp"

namespace levyou::cli {

using subordinator::SubordinatorSpec;

namespace {

// ---------------------------------------------------------------- parameter records

// Typed view of a JSON object. Getters record the resolved value so the
// report can echo defaults; done() rejects keys nobody asked for.
class Record {
 public:
  Record(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key, double def) {
    const json* v = get(key);
    const double x = v ? as_number(*v, at(key)) : def;
    echo_[key] = x;
    return x;
  }
  double positive(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x > 0.0)) throw ConfigError(at(key) + ": must be positive");
    return x;
  }
  std::size_t count(const std::string& key, std::size_t def, std::size_t min = 1) {
    const json* v = get(key);
    const std::size_t n = v ? as_count(*v, at(key)) : def;
    if (n < min) throw ConfigError(at(key) + ": must be at least " + std::to_string(min));
    echo_[key] = n;
    return n;
  }
  bool flag(const std::string& key, bool def) {
    const json* v = get(key);
    if (v && !v->is_boolean()) throw ConfigError(at(key) + ": expected true or false");
    const bool b = v ? v->get<bool>() : def;
    echo_[key] = b;
    return b;
  }
  std::string text(const std::string& key, std::string def, const std::vector<std::string>& allowed) {
    const json* v = get(key);
    if (v && !v->is_string()) throw ConfigError(at(key) + ": expected a string");
    std::string s = v ? v->get<std::string>() : def;
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(at(key) + ": '" + s + "' is not one of " + list);
    }
    echo_[key] = s;
    return s;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> def, bool allow_empty = false) {
    const json* v = get(key);
    if (v) {
      if (!v->is_array() || (v->empty() && !allow_empty)) throw ConfigError(at(key) + ": expected an array of numbers");
      def.clear();
      for (std::size_t i = 0; i < v->size(); ++i) def.push_back(as_number((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
    }
    echo_[key] = def;
    return def;
  }
  std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> def) {
    const json* v = get(key);
    if (v) {
      if (!v->is_array() || v->empty()) throw ConfigError(at(key) + ": expected a non-empty array of integers");
      def.clear();
      for (std::size_t i = 0; i < v->size(); ++i) def.push_back(as_count((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
    }
    echo_[key] = def;
    return def;
  }
  // nested record; the caller finishes it with adopt()
  Record child(const std::string& key) {
    const json* v = get(key);
    static const json empty = json::object();
    return Record(v ? *v : empty, at(key));
  }
  void adopt(const std::string& key, Record& c) { echo_[key] = c.done(); }
  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }
  void mark(const std::string& key) { used_.insert(key); }
  void set_echo(const std::string& key, json v) { echo_[key] = std::move(v); }

  json done() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) throw ConfigError(at(item.key()) + ": unknown field");
    return echo_;
  }

 private:
  const json* get(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + ": must be finite");
    return x;
  }
  static std::size_t as_count(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    throw ConfigError(where + ": expected a non-negative integer");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
  json echo_ = json::object();
};

SubordinatorSpec parse_subordinator(Record& parent, const std::string& key, const std::string& def_kind,
                                    double def_beta, double def_drift) {
  Record r = parent.child(key);
  const auto kind = r.text("kind", def_kind, {"stable", "drift-only", "compound-poisson"});
  if (kind == "stable") {
    const double beta = r.number("beta", def_beta);
    const double drift = r.number("drift", 0.0);
    parent.adopt(key, r);
    return SubordinatorSpec::stable(beta, drift);
  }
  if (kind == "drift-only") {
    const double drift = r.number("drift", def_drift);
    parent.adopt(key, r);
    return SubordinatorSpec::drift_only(drift);
  }
  const double drift = r.number("drift", 0.0);
  if (!r.has("atoms")) throw ConfigError(r.at("atoms") + ": required for compound-poisson");
  const json& atoms = r.raw("atoms");
  if (!atoms.is_array() || atoms.empty()) throw ConfigError(r.at("atoms") + ": expected a non-empty array");
  std::vector<subordinator::Atom> list;
  json echo = json::array();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    Record a(atoms[i], r.at("atoms") + "[" + std::to_string(i) + "]");
    list.push_back({a.positive("size", 1.0), a.positive("rate", 1.0)});
    echo.push_back(a.done());
  }
  r.set_echo("atoms", echo);
  parent.adopt(key, r);
  return SubordinatorSpec::compound_poisson(std::move(list), drift);
}

// ---------------------------------------------------------------- output helpers

struct Outcome {
  json results = json::object();
  std::vector<Assertion> assertions;
  std::vector<CsvArtifact> csv;

  void check(std::string name, bool pass, std::string detail) {
    assertions.push_back({std::move(name), pass, std::move(detail)});
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

// random test functional: phi_j = c g_j / (w_j sqrt(N)), so |phi|_H ~ c
std::vector<double> random_functional(const std::vector<double>& w, RandomStream& rng) {
  const double c = 0.5 + rng.uniform();
  std::vector<double> phi(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) phi[j] = c * rng.normal() / (w[j] * std::sqrt(static_cast<double>(w.size())));
  return phi;
}

bool within_sigmas(double emp, double se, double exact, double sigmas) {
  const double d = std::fabs(emp - exact);
  return se > 0.0 ? d <= sigmas * se : d <= 1e-12;
}

// ---------------------------------------------------------------- experiments

struct Experiment {
  std::string kind;
  std::string exercises;
  std::string summary;
  // parses params, returns the runnable body (validation happens here)
  std::function<std::function<void(const ExperimentConfig&, Outcome&)>(Record&)> prepare;
};

std::function<void(const ExperimentConfig&, Outcome&)> prepare_subordinator_check(Record& p) {
  const auto spec = parse_subordinator(p, "subordinator", "stable", 0.5, 1.0);
  const double t = p.positive("horizon", 1.0);
  const auto rs = p.numbers("r", {0.5, 1.0, 2.0});
  for (double r : rs)
    if (!(r >= 0.0)) throw ConfigError(p.at("r") + ": entries must be non-negative");
  const std::size_t paths = p.count("paths", 100000, 2);
  const double sigmas = p.positive("sigmas", 4.0);
  return [=](const ExperimentConfig& cfg, Outcome& out) {
    const auto est = mc_means(paths, rs.size(), component_seed(cfg, "paths"), tag("laplace"),
                              [&](RandomStream& rng, std::span<double> o) {
                                const auto z = subordinator::simulate_path(spec, t, {}, rng.next_u64());
                                const double zt = z.value(t);
                                for (std::size_t i = 0; i < rs.size(); ++i) o[i] = std::exp(-rs[i] * zt);
                              });
    auto os = csv_stream();
    os << "r,empirical,stderr,exact,z_score\n";
    json rows = json::array();
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double exact = std::exp(-t * subordinator::laplace_exponent(spec, rs[i]));
      const double z = est[i].stderr_ > 0 ? (est[i].mean - exact) / est[i].stderr_ : 0.0;
      os << rs[i] << ',' << est[i].mean << ',' << est[i].stderr_ << ',' << exact << ',' << z << '\n';
      rows.push_back({{"r", rs[i]}, {"empirical", est[i].mean}, {"stderr", est[i].stderr_}, {"exact", exact}});
      out.check("laplace transform at r = " + fmt(rs[i]), within_sigmas(est[i].mean, est[i].stderr_, exact, sigmas),
                "empirical " + fmt(est[i].mean) + " vs exact " + fmt(exact) + " (z = " + fmt(z) + ")");
    }
    out.results["laplace"] = rows;
    out.results["finite_variation"] = subordinator::finite_variation_diagnostic(spec);
    out.csv.push_back({"laplace.csv", os.str()});
  };
}

struct NoiseParams {
  std::size_t modes;
  double theta;
  SubordinatorSpec sub;
};

NoiseParams parse_noise(Record& p, std::size_t def_modes, double def_theta, const std::string& def_kind, double def_beta,
                        double def_drift) {
  NoiseParams n{p.count("modes", def_modes, 1), p.number("theta", def_theta),
                parse_subordinator(p, "subordinator", def_kind, def_beta, def_drift)};
  return n;
}

std::function<void(const ExperimentConfig&, Outcome&)> prepare_charfn_test(Record& p) {
  const auto np = parse_noise(p, 64, 0.0, "stable", 0.9, 1.0);
  const double length = p.positive("length", std::numbers::pi);
  const auto times = p.numbers("times", {0.5, 1.0});
  for (double t : times)
    if (!(t > 0.0)) throw ConfigError(p.at("times") + ": entries must be positive");
  const std::size_t nphi = p.count("functionals", 5);
  const std::size_t paths = p.count("paths", 100000, 2);
  const double sigmas = p.positive("sigmas", 4.0);
  const auto modes = ModeSet::line(np.modes, length);
  const cylnoise::LevyNoiseSpec spec{cylnoise::CylindricalWienerSpec::hilbert_scale(modes, np.theta), np.sub};
  return [=](const ExperimentConfig& cfg, Outcome& out) {
    RandomStream prng(component_seed(cfg, "functionals"), 0);
    std::vector<std::vector<double>> phis;
    for (std::size_t k = 0; k < nphi; ++k) phis.push_back(random_functional(spec.wiener.weights(), prng));
    const std::size_t K = times.size() * nphi;
    const auto est = mc_means(paths, K, component_seed(cfg, "paths"), tag("charfn"),
                              [&](RandomStream& rng, std::span<double> o) {
                                for (std::size_t i = 0; i < times.size(); ++i) {
                                  const std::uint64_t s = rng.next_u64();
                                  const auto grid = TimeGrid::uniform(times[i], 1);
                                  const auto z = subordinator::simulate_path(spec.subordinator, times[i], {}, s);
                                  const auto inc = cylnoise::sample_increments(spec, z, grid, s);
                                  for (std::size_t k = 0; k < nphi; ++k)
                                    o[i * nphi + k] = std::cos(spec.wiener.pairing(inc[0].coefficients, phis[k]));
                                }
                              });
    auto os = csv_stream();
    os << "t,functional,h_norm,empirical,stderr,exact\n";
    json rows = json::array();
    for (std::size_t i = 0; i < times.size(); ++i)
      for (std::size_t k = 0; k < nphi; ++k) {
        const auto& e = est[i * nphi + k];
        const double exact = cylnoise::char_functional(spec, phis[k], times[i]);
        const double hn = std::sqrt(spec.wiener.squared_norm(phis[k]));
        os << times[i] << ',' << k << ',' << hn << ',' << e.mean << ',' << e.stderr_ << ',' << exact << '\n';
        rows.push_back({{"t", times[i]}, {"functional", k}, {"empirical", e.mean}, {"stderr", e.stderr_}, {"exact", exact}});
        out.check("noise characteristic functional, t = " + fmt(times[i]) + ", phi " + std::to_string(k),
                  within_sigmas(e.mean, e.stderr_, exact, sigmas),
                  "empirical " + fmt(e.mean) + " +- " + fmt(e.stderr_) + " vs " + fmt(exact));
      }
    out.results["charfn"] = rows;
    out.csv.push_back({"charfn.csv", os.str()});
  };
}

std::function<void(const ExperimentConfig&, Outcome&)> prepare_ou_sample(Record& p) {
  const auto np = parse_noise(p, 32, 0.0, "stable", 0.7, 1.0);
  const std::size_t dim = p.count("dim", 1);
  const double gamma = p.positive("gamma", 1.0);
  const auto times = p.numbers("times", {0.5, 1.0});
  for (double t : times)
    if (!(t > 0.0)) throw ConfigError(p.at("times") + ": entries must be positive");
  const std::size_t nphi = p.count("functionals", 5);
  const std::size_t paths = p.count("paths", 20000, 2);
  const double cutoff = p.positive("cutoff", 1e-4);
  const double sigmas = p.positive("sigmas", 4.0);
  const double quad_tol = p.positive("quadrature_tolerance", 1e-10);
  const auto op = spectral_ou::SpectralOperator::cube(dim, np.modes, gamma);
  const cylnoise::LevyNoiseSpec spec{cylnoise::CylindricalWienerSpec::hilbert_scale(*op.modes(), np.theta), np.sub};
  return [=](const ExperimentConfig& cfg, Outcome& out) {
    RandomStream prng(component_seed(cfg, "functionals"), 0);
    std::vector<std::vector<double>> phis;
    for (std::size_t k = 0; k < nphi; ++k) phis.push_back(random_functional(spec.wiener.weights(), prng));
    const bool gaussian = spec.subordinator.kind() == subordinator::Kind::DriftOnly;
    auto os = csv_stream();
    os << "t,functional,empirical,stderr,oracle\n";
    json rows = json::array();
    std::uint64_t idx = 0;
    for (double t : times)
      for (std::size_t k = 0; k < nphi; ++k, ++idx) {
        const double oracle = spectral_ou::charfn_oracle(op, spec, phis[k], t, quad_tol);
        const auto e = spectral_ou::empirical_charfn(op, spec, phis[k], t, paths,
                                                     stream_id({component_seed(cfg, "paths"), idx}), cutoff);
        os << t << ',' << k << ',' << e.mean << ',' << e.stderr_ << ',' << oracle << '\n';
        json row = {{"t", t}, {"functional", k}, {"empirical", e.mean}, {"stderr", e.stderr_}, {"oracle", oracle}};
        out.check("OU characteristic functional, t = " + fmt(t) + ", phi " + std::to_string(k),
                  within_sigmas(e.mean, e.stderr_, oracle, sigmas),
                  "empirical " + fmt(e.mean) + " +- " + fmt(e.stderr_) + " vs oracle " + fmt(oracle));
        if (gaussian) {
          // exp(-b/2 sum w^2 phi^2 (1 - e^{-2 lambda t}) / (2 lambda))
          double s = 0.0;
          const auto& w = spec.wiener.weights();
          for (std::size_t j = 0; j < op.size(); ++j) {
            const double l = op.eigenvalue(j);
            s += w[j] * w[j] * phis[k][j] * phis[k][j] * -std::expm1(-2.0 * l * t) / (2.0 * l);
          }
          const double closed = std::exp(-0.5 * spec.subordinator.drift() * s);
          row["closed_form"] = closed;
          out.check("Gaussian closed form, t = " + fmt(t) + ", phi " + std::to_string(k),
                    std::fabs(closed - oracle) <= 1e-8, "|oracle - closed form| = " + fmt(std::fabs(closed - oracle)));
        }
        rows.push_back(row);
      }
    out.results["charfn"] = rows;
    out.csv.push_back({"ou_charfn.csv", os.str()});
    // one field sample at the last time
    subordinator::PathOptions po;
    po.method = subordinator::SamplingMethod::CutoffJumps;
    po.cutoff = cutoff;
    const std::uint64_t fs = component_seed(cfg, "field");
    const auto z = subordinator::simulate_path(spec.subordinator, times.back(), po, fs);
    const auto x = spectral_ou::sample_convolution(op, spec, z, times.back(), fs);
    std::ostringstream field;
    field << std::setprecision(17);
    spectral_ou::write_field_csv(field, x);
    out.csv.push_back({"field.csv", field.str()});
  };
}

std::function<void(const ExperimentConfig&, Outcome&)> prepare_regularity(Record& p) {
  const auto np = parse_noise(p, 2048, 0.0, "drift-only", 0.5, 1.0);
  const std::size_t M = p.count("grid", 4096, 16);
  if (M & (M - 1)) throw ConfigError(p.at("grid") + ": must be a power of 2");
  const double gamma = p.positive("gamma", 1.0);
  const std::size_t paths = p.count("paths", 20);
  const double t = p.positive("time", 1.0);
  const double band = p.positive("band", 0.2);
  const double cutoff = p.positive("cutoff", 1e-4);
  const double hmin_factor = p.positive("refine_factor", 1e-3);
  const double ratio = p.positive("refine_ratio", 1.05);
  const auto op = spectral_ou::SpectralOperator::cube(1, np.modes, gamma);
  const cylnoise::LevyNoiseSpec spec{cylnoise::CylindricalWienerSpec::hilbert_scale(*op.modes(), np.theta), np.sub};
  const auto bound = spectral_ou::regularity_exponent_bound(op, spec, spectral_ou::RegularityTarget::holder(0.0));
  return [=](const ExperimentConfig& cfg, Outcome& out) {
    const bool stable = spec.subordinator.kind() == subordinator::Kind::Stable;
    std::vector<regularity::HolderEstimate> est(paths);
    spectral_ou::FieldSample first;
    for (std::size_t i = 0; i < paths; ++i) {
      const std::uint64_t s = stream_id({component_seed(cfg, "paths"), i});
      subordinator::PathOptions po;
      if (stable) {
        // jumps sit on grid nodes refined toward t, so no small-jump drift is added
        po.method = subordinator::SamplingMethod::ExactGrid;
        po.grid = TimeGrid::refined_toward(t, t, hmin_factor / op.eigenvalues().back(), ratio);
      } else {
        po.method = subordinator::SamplingMethod::CutoffJumps;
        po.cutoff = cutoff;
      }
      const auto z = subordinator::simulate_path(spec.subordinator, t, po, s);
      const auto x = spectral_ou::sample_convolution(op, spec, z, t, s);
      est[i] = regularity::estimate_holder(x, M);
      if (i == 0) first = x;
    }
    RunningStat st;
    auto os = csv_stream();
    os << "path,delta,stderr\n";
    for (std::size_t i = 0; i < paths; ++i) {
      st.add(est[i].delta);
      os << i << ',' << est[i].delta << ',' << est[i].stderr_ << '\n';
    }
    auto sc = csv_stream();
    sc << "scale,max_increment\n";
    for (std::size_t k = 0; k < est[0].scales.size(); ++k) sc << est[0].scales[k] << ',' << est[0].increments[k] << '\n';
    std::ostringstream field;
    field << std::setprecision(17);
    spectral_ou::write_field_csv(field, first);
    // one-sided: the critical exponent never falls below the Gaussian one for
    // the same operator, and the estimator reads low for heavy-tailed noise
    const double gaussian = op.gamma() - 0.5;  // g/2 - d/2 with g = 2 gamma, d = 1
    const double floor = std::min({bound.critical, gaussian, 1.0}) - band;
    out.results["delta_mean"] = st.mean();
    out.results["delta_stderr"] = st.stderr_of_mean();
    out.results["delta_critical"] = bound.critical;
    out.results["exponent_p"] = bound.p;
    out.results["above_critical"] = st.mean() > bound.critical + band;
    out.check("estimated exponent is not below the Gaussian critical one", st.mean() >= floor,
              "mean " + fmt(st.mean()) + " >= min(delta*, delta_gauss, 1) - band = " + fmt(floor));
    out.results["delta_gaussian"] = gaussian;
    out.csv.push_back({"holder.csv", os.str()});
    out.csv.push_back({"scales.csv", sc.str()});
    out.csv.push_back({"field.csv", field.str()});
  };
}

std::function<void(const ExperimentConfig&, Outcome&)> prepare_blowup(Record& p) {
  const auto np = parse_noise(p, 4096, 0.0, "stable", 0.6, 1.0);
  std::vector<std::size_t> def;
  for (std::size_t n = 64; n <= np.modes; n *= 2) def.push_back(n);
  if (def.empty() || def.back() != np.modes) def.push_back(np.modes);
  const auto truncs = p.counts("truncations", def);
  const double f_order = p.number("f_order", 1.0);
  const double u_order = p.number("u_order", -1.0);
  const double gamma = p.positive("gamma", 1.0);
  const std::size_t wanted = p.count("conclusive", 10);
  const std::size_t attempts = p.count("max_attempts", 200);
  const std::size_t min_success = p.count("min_success", 8, 0);
  regularity::BlowupOptions o;
  o.horizon = p.positive("horizon", 1.0);
  o.window = p.positive("window", 0.1);
  o.threshold = p.positive("threshold", 1.0);
  o.time_points = p.count("time_points", 24);
  o.cutoff = p.positive("cutoff", 1e-4);
  o.growth_slope = p.positive("growth_slope", 0.1);
  o.u_ratio = p.positive("u_ratio", 2.0);
  if (min_success > wanted) throw ConfigError(p.at("min_success") + ": exceeds the number of conclusive seeds");
  const auto op = spectral_ou::SpectralOperator::cube(1, np.modes, gamma);
  const cylnoise::LevyNoiseSpec spec{cylnoise::CylindricalWienerSpec::hilbert_scale(*op.modes(), np.theta), np.sub};
  const auto F = SpaceSpec::hilbert_scale(*op.modes(), f_order, SpaceRole::F);
  const auto U = SpaceSpec::hilbert_scale(*op.modes(), u_order, SpaceRole::U);
  // (F_j / w_j)^2 = mu_j^{f - theta} with mu_j ~ n^2
  const bool divergent = 2.0 * (f_order - np.theta) >= -1.0;
  for (std::size_t i = 0; i < truncs.size(); ++i)
    if (truncs[i] == 0 || truncs[i] > np.modes || (i && truncs[i] <= truncs[i - 1]))
      throw ConfigError(p.at("truncations") + ": must increase and not exceed modes");
  return [=](const ExperimentConfig& cfg, Outcome& out) {
    std::size_t conclusive = 0, success = 0, tried = 0;
    auto os = csv_stream();
    os << "attempt,tau1,jump_size,slope,u_spread,growth,u_bounded\n";
    auto sup = csv_stream();
    sup << "attempt,N,sup_f,sup_u\n";
    json ratio_sums;
    for (; tried < attempts && conclusive < wanted; ++tried) {
      const auto r = regularity::blowup_probe(op, spec, F, U, truncs, stream_id({component_seed(cfg, "seeds"), tried}), o);
      if (!r.conclusive) continue;
      ++conclusive;
      const bool ok = divergent ? r.success : !r.growth;
      success += ok;
      os << tried << ',' << r.tau1 << ',' << r.jump_size << ',' << r.slope << ',' << r.u_spread << ',' << r.growth << ','
         << r.u_bounded << '\n';
      for (std::size_t i = 0; i < truncs.size(); ++i)
        sup << tried << ',' << truncs[i] << ',' << r.sup_f[i] << ',' << r.sup_u[i] << '\n';
      ratio_sums = r.weight_ratio_sum;
    }
    out.results["attempts"] = tried;
    out.results["conclusive"] = conclusive;
    out.results["successes"] = success;
    out.results["ratio_series_divergent"] = divergent;
    out.results["weight_ratio_partial_sums"] = ratio_sums;
    out.check("enough seeds with a large jump", conclusive == wanted,
              std::to_string(conclusive) + " of " + std::to_string(wanted) + " after " + std::to_string(tried) + " attempts");
    out.check(divergent ? "F-norm grows with N while the U-norm stays bounded" : "no growth when the ratio series converges",
              success >= min_success, std::to_string(success) + " of " + std::to_string(conclusive) + " conclusive seeds");
    out.csv.push_back({"blowup.csv", os.str()});
    out.csv.push_back({"sup.csv", sup.str()});
  };
}

std::function<void(const ExperimentConfig&, Outcome&)> prepare_circle(Record& p) {
  const auto sub = parse_subordinator(p, "subordinator", "stable", 0.8, 1.0);
  const auto thetas = p.numbers("thetas", {-0.4, -0.2, 0.0, 0.25, 0.5, 1.0, 1.5});
  const auto grids = p.counts("grids", {256, 1024, 4096, 16384});
  const double slope = p.positive("growth_slope", 0.1);
  const std::size_t finest = *std::max_element(grids.begin(), grids.end());
  for (auto g : grids)
    if (g < 4 || g % 2 || finest % g) throw ConfigError(p.at("grids") + ": even sizes that divide the finest grid");
  return [=](const ExperimentConfig& cfg, Outcome& out) {
    const auto sw = regularity::circle_sweep(sub, thetas, grids, component_seed(cfg, "path"), slope);
    const bool rough_path = !subordinator::finite_variation_diagnostic(sub);
    auto os = csv_stream();
    os << "theta,grid,sup\n";
    json rows = json::array();
    for (const auto& row : sw.rows) {
      for (std::size_t i = 0; i < sw.grids.size(); ++i) os << row.theta << ',' << sw.grids[i] << ',' << row.sups[i] << '\n';
      rows.push_back({{"theta", row.theta}, {"slope", row.slope}, {"growth", row.growth}, {"sups", row.sups}});
      if (row.theta > 0.5)
        out.check("bounded for theta = " + fmt(row.theta), !row.growth, "log-log slope " + fmt(row.slope));
      else if (row.theta < 0.0 && rough_path)
        out.check("grows for theta = " + fmt(row.theta), row.growth, "log-log slope " + fmt(row.slope));
    }
    out.results["rows"] = rows;
    out.results["unbounded_variation"] = rough_path;
    out.csv.push_back({"circle.csv", os.str()});
  };
}

burgers::SpectralField constant_field(std::vector<double> c) {
  return [c = std::move(c)](double, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < c.size() && j < out.size(); ++j) out[j] = c[j];
  };
}

std::function<void(const ExperimentConfig&, Outcome&)> prepare_burgers(Record& p) {
  burgers::Discretization d;
  d.M = p.count("grid", 256, 4);
  d.dt = p.positive("dt", 1e-4);
  d.horizon = p.positive("horizon", 0.1);
  Record nr = p.child("noise");
  const auto np = parse_noise(nr, 64, 0.25, "stable", 0.75, 1.0);
  p.adopt("noise", nr);
  burgers::StochasticOptions so;
  so.cutoff = p.positive("cutoff", 1e-4);
  so.allow_l2_noise = p.flag("allow_l2_noise", false);
  const auto u0 = p.numbers("initial", {1.0 / std::numbers::sqrt2});
  const auto forcing = p.numbers("forcing", {}, true);
  std::vector<int> ks;
  for (auto k : p.counts("test_modes", {1, 2, 3, 4, 5})) ks.push_back(static_cast<int>(k));
  const double res_tol = p.positive("residual_tolerance", 1e-3);
  const bool cauchy = p.flag("cauchy", true);
  const double cauchy_tol = p.positive("cauchy_tolerance", 0.05);
  const std::size_t every = p.count("csv_every", 10);
  const cylnoise::LevyNoiseSpec spec{
      cylnoise::CylindricalWienerSpec::hilbert_scale(ModeSet::line(np.modes, 1.0), np.theta), np.sub};
  if (np.modes > d.M - 1) throw ConfigError(p.at("noise.modes") + ": more noise modes than the grid resolves");
  if (u0.size() > d.M - 1 || forcing.size() > d.M - 1)
    throw ConfigError(p.at("initial") + ": more coefficients than the grid resolves");
  for (int k : ks)
    if (static_cast<std::size_t>(k) > d.M - 1 || k < 1) throw ConfigError(p.at("test_modes") + ": out of range");
  const double theta = np.theta;
  if (!(theta < 0.5) || theta < 0.0 || (theta == 0.0 && !so.allow_l2_noise))
    throw ConfigError(p.at("noise.theta") + ": must lie in (0, 1/2) (0 needs allow_l2_noise)");
  {
    const double r = d.horizon / d.dt;
    if (std::fabs(r - std::round(r)) > 1e-9 * r) throw ConfigError(p.at("dt") + ": must divide the horizon");
  }
  return [=](const ExperimentConfig& cfg, Outcome& out) {
    const auto f = constant_field(forcing);
    const std::uint64_t seed = component_seed(cfg, "noise");
    const auto r = burgers::solve_stochastic_burgers(u0, spec, f, d, seed, so);
    const auto w = burgers::weak_form_residual(r, u0, f, ks);
    out.results["sup_energy"] = r.sup_energy;
    out.results["l4_integral"] = r.l4_integral;
    out.results["shift_l4_levels"] = r.shift_l4_levels;
    out.results["residuals"] = w.max_abs;
    out.results["s_exponent"] = 0.5 - theta / 2.0;
    out.check("solution certificate is finite", std::isfinite(r.sup_energy) && std::isfinite(r.l4_integral),
              "sup |u|^2 = " + fmt(r.sup_energy) + ", int |u|_L4^4 = " + fmt(r.l4_integral));
    out.check("weak-form residual", w.worst < res_tol, "max " + fmt(w.worst) + " < " + fmt(res_tol));
    if (cauchy) {
      const auto c = burgers::cauchy_refinement(u0, spec, f, d, seed, cauchy_tol, so);
      out.results["cauchy_gap"] = c.gap;
      out.check("pathwise refinement", c.pass, "relative gap " + fmt(c.gap) + " <= " + fmt(cauchy_tol));
    }
    std::ostringstream traj;
    traj << std::setprecision(17);
    burgers::write_trajectory_csv(traj, r.u, d.dt, std::min<std::size_t>(d.M, 256), every);
    out.csv.push_back({"u.csv", traj.str()});
  };
}

std::function<void(const ExperimentConfig&, Outcome&)> prepare_bounds(Record& p) {
  const std::size_t instances = p.count("instances", 50);
  burgers::Discretization d;
  d.M = p.count("grid", 32, 4);
  d.dt = p.positive("dt", 1e-3);
  d.horizon = p.positive("horizon", 1.0);
  const double z_scale = p.number("z_scale", 1.0);
  const double g_scale = p.number("g_scale", 2.0);
  const std::size_t active = p.count("active_modes", 4);
  const double slack = p.number("slack", 0.05);
  if (active > d.M - 1) throw ConfigError(p.at("active_modes") + ": more modes than the grid resolves");
  {
    const double r = d.horizon / d.dt;
    if (std::fabs(r - std::round(r)) > 1e-9 * r) throw ConfigError(p.at("dt") + ": must divide the horizon");
  }
  return [=](const ExperimentConfig& cfg, Outcome& out) {
    std::vector<burgers::AprioriReport> reps(instances);
    parallel_for(instances, [&](std::size_t i) {
      RandomStream rng(component_seed(cfg, "instances"), i);
      std::vector<double> v0(active), za(active), zw(active), zp(active), ga(active), gw(active), gp(active);
      for (std::size_t k = 0; k < active; ++k) {
        const double decay = 1.0 / static_cast<double>(k + 1);
        v0[k] = rng.normal() * decay;
        za[k] = z_scale * rng.normal() * decay;
        zw[k] = 6.0 * rng.uniform();
        zp[k] = 2.0 * std::numbers::pi * rng.uniform();
        ga[k] = g_scale * rng.normal();
        gw[k] = 6.0 * rng.uniform();
        gp[k] = 2.0 * std::numbers::pi * rng.uniform();
      }
      const auto wave = [](std::vector<double> a, std::vector<double> w, std::vector<double> ph) -> burgers::SpectralField {
        return [a, w, ph](double t, std::span<double> o) {
          std::fill(o.begin(), o.end(), 0.0);
          for (std::size_t k = 0; k < a.size() && k < o.size(); ++k) o[k] = a[k] * std::cos(w[k] * t + ph[k]);
        };
      };
      reps[i] = burgers::check_apriori(burgers::solve_modified_burgers(v0, wave(za, zw, zp), wave(ga, gw, gp), d), slack);
    });
    auto os = csv_stream();
    os << "instance,check,lhs,rhs,holds\n";
    std::vector<std::size_t> held(4, 0);
    std::vector<double> worst(4, 0.0);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < instances; ++i)
      for (std::size_t c = 0; c < reps[i].checks.size(); ++c) {
        const auto& b = reps[i].checks[c];
        if (i == 0) names.push_back(b.name);
        held[c] += b.holds;
        worst[c] = std::max(worst[c], b.rhs > 0 ? b.lhs / b.rhs : (b.lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0));
        os << i << ",\"" << b.name << "\"," << b.lhs << ',' << b.rhs << ',' << b.holds << '\n';
      }
    json rows = json::array();
    for (std::size_t c = 0; c < names.size(); ++c) {
      rows.push_back({{"check", names[c]}, {"held", held[c]}, {"largest_ratio", worst[c]}});
      out.check(names[c], held[c] == instances,
                std::to_string(held[c]) + "/" + std::to_string(instances) + " instances, largest lhs/rhs " + fmt(worst[c]));
    }
    out.results["checks"] = rows;
    out.csv.push_back({"bounds.csv", os.str()});
  };
}

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = {
      {"subordinator-check", "Laplace exponent of the subordinator",
       "Monte Carlo E exp(-r Z(t)) against exp(-t psi(r))", prepare_subordinator_check},
      {"charfn-test", "characteristic functional of subordinated cylindrical noise",
       "E exp(i <Y(t), phi>_H) against exp(-t psi(|phi|_H^2 / 2))", prepare_charfn_test},
      {"ou-sample", "OU characteristic functional",
       "sampled stochastic convolution against the quadrature oracle", prepare_ou_sample},
      {"regularity", "spatial regularity exponent of the OU process",
       "Holder exponent estimate against the critical exponent", prepare_regularity},
      {"blowup", "non-cadlag trajectories under large jumps",
       "post-jump F-norm growth in the truncation with bounded U-norm", prepare_blowup},
      {"circle", "stochastic convolution on the circle",
       "sup of the convolution under grid refinement across profile smoothness", prepare_circle},
      {"burgers", "pathwise stochastic Burgers solution",
       "OU shift plus modified Burgers solve, weak-form residual, refinement", prepare_burgers},
      {"bounds", "a priori bounds for the modified Burgers equation",
       "four energy inequalities on random smooth data", prepare_bounds},
  };
  return r;
}

const Experiment& find(const std::string& kind) {
  for (const auto& e : registry())
    if (e.kind == kind) return e;
  std::string list;
  for (const auto& e : registry()) list += (list.empty() ? "" : ", ") + e.kind;
  throw ConfigError("experiment: unknown kind '" + kind + "' (expected one of " + list + ")");
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> info = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : registry()) v.push_back({e.kind, e.exercises, e.summary});
    return v;
  }();
  return info;
}

std::uint64_t component_seed(const ExperimentConfig& config, std::string_view component) {
  return stream_id({config.master_seed, tag(config.kind), tag(component)});
}

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
  try {
    Record top(j, "config");
    ExperimentConfig c;
    std::vector<std::string> kinds;
    for (const auto& e : registry()) kinds.push_back(e.kind);
    if (!top.has("experiment")) throw ConfigError("config.experiment: required field is missing");
    c.kind = top.text("experiment", "", kinds);
    {
      const json* seed = j.contains("seed") ? &j.at("seed") : nullptr;
      if (seed && !seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0))
        throw ConfigError("config.seed: expected a non-negative 64-bit integer");
      c.master_seed = seed ? seed->get<std::uint64_t>() : 0;
      top.mark("seed");
    }
    c.threads = static_cast<int>(top.count("threads", 0, 0));
    if (j.contains("output")) {
      if (!j.at("output").is_string()) throw ConfigError("config.output: expected a string");
      c.out_dir = j.at("output").get<std::string>();
    }
    top.mark("output");
    c.params = j.contains("params") ? j.at("params") : json::object();
    top.mark("params");
    top.done();
    Record p(c.params, "params");
    (void)find(c.kind).prepare(p);
    c.params = json(p.done());
    return c;
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

RunResult run(const ExperimentConfig& config) {
  RunResult res;
  res.report = {{"experiment", config.kind}, {"seed", config.master_seed}};
  try {
    const auto& exp = find(config.kind);
    res.report["exercises"] = exp.exercises;
    if (config.threads > 0) set_thread_count(config.threads);
    Record p(config.params, "params");
    auto body = exp.prepare(p);
    res.report["params"] = p.done();
    Outcome out;
    body(config, out);
    res.assertions = out.assertions;
    res.csv = std::move(out.csv);
    res.report["results"] = out.results;
    json as = json::array();
    bool all = true;
    for (const auto& a : res.assertions) {
      as.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
      all = all && a.pass;
    }
    res.report["assertions"] = as;
    res.report["pass"] = all;
    res.exit_code = all ? Pass : AssertionFailed;
  } catch (const ConfigError& e) {
    res.exit_code = InvalidConfig;
    res.message = e.what();
  } catch (const NumericError& e) {
    res.exit_code = NumericFailure;
    res.message = e.what();
  }
  if (res.exit_code == InvalidConfig || res.exit_code == NumericFailure) {
    res.report["pass"] = false;
    res.report["error"] = res.message;
  }
  return res;
}

void write_artifacts(const RunResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(std::filesystem::path(out_dir) / "report.json");
    if (!os) throw ConfigError(out_dir + ": cannot write report.json");
    os << result.report.dump(2) << '\n';
  }
  for (const auto& c : result.csv) {
    std::ofstream os(std::filesystem::path(out_dir) / c.name);
    if (!os) throw ConfigError(out_dir + ": cannot write " + c.name);
    os << c.content;
  }
}

}  // namespace levyou::cli

#include "cochlea/model.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace cochlea {

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::Passive:
      return "passive";
    case NonlinearityKind::ExpRayleigh:
      return "exp-rayleigh";
    case NonlinearityKind::TanhRayleigh:
      return "tanh-rayleigh";
  }
  return "passive";
}

NonlinearityKind nonlinearity_kind_from_string(const std::string& name) {
  if (name == "passive") return NonlinearityKind::Passive;
  if (name == "exp-rayleigh") return NonlinearityKind::ExpRayleigh;
  if (name == "tanh-rayleigh") return NonlinearityKind::TanhRayleigh;
  throw ConfigError("unknown nonlinearity kind '" + name +
                    "' (expected passive, exp-rayleigh or tanh-rayleigh)");
}

double Nonlinearity::sup_abs() const {
  switch (kind) {
    case NonlinearityKind::ExpRayleigh:
      // max of rho*s*exp(-c s) is attained at s = 1/c
      return rho / (c * std::exp(1.0));
    case NonlinearityKind::TanhRayleigh:
      return 1.0;
    case NonlinearityKind::Passive:
      break;
  }
  return 0.0;
}

double Forcing::bound() const {
  double b = 0.0;
  for (const auto& tone : tones) b += std::abs(tone.amp);
  return b;
}

double forcing_at(const Forcing& f, double t) {
  double sum = 0.0;
  for (const auto& tone : f.tones) sum += tone.amp * std::cos(tone.omega * t);
  if (f.ramp_time > 0.0 && t < f.ramp_time) {
    sum *= 0.5 * (1.0 - std::cos(kPi * t / f.ramp_time));
  }
  return sum;
}

Vec Grid::nodes() const {
  Vec x(n);
  for (int j = 0; j < n; ++j) x(j) = this->x(j);
  return x;
}

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& i) {
    return i.severity == ValidationIssue::Severity::Error;
  });
}

std::vector<std::string> ValidationReport::errors() const {
  std::vector<std::string> out;
  for (const auto& i : issues)
    if (i.severity == ValidationIssue::Severity::Error) out.push_back(i.check + ": " + i.message);
  return out;
}

std::vector<std::string> ValidationReport::warnings() const {
  std::vector<std::string> out;
  for (const auto& i : issues)
    if (i.severity == ValidationIssue::Severity::Warning) out.push_back(i.check + ": " + i.message);
  return out;
}

namespace {

void require(ValidationReport& report, bool condition, const std::string& check,
             const std::string& message) {
  if (!condition) report.issues.push_back({ValidationIssue::Severity::Error, check, message});
}

void warn(ValidationReport& report, const std::string& check, const std::string& message) {
  report.issues.push_back({ValidationIssue::Severity::Warning, check, message});
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate_params(const ModelParams& p, const Grid* grid) {
  ValidationReport report;
  require(report, std::isfinite(p.m) && p.m > 0.0, "mass", "m must be positive, got " + num(p.m));
  require(report, std::isfinite(p.r) && p.r > 0.0, "friction",
          "r must be positive, got " + num(p.r));
  require(report, std::isfinite(p.delta) && p.delta >= 0.0, "aspect-ratio",
          "delta must be nonnegative, got " + num(p.delta));
  require(report, p.stiffness.k0 > 0.0, "stiffness", "k0 must be positive");
  require(report, p.stiffness.alpha >= 0.0, "stiffness", "alpha must be nonnegative");
  require(report, p.forcing.ramp_time >= 0.0, "forcing", "ramp_time must be nonnegative");
  for (const auto& tone : p.forcing.tones) {
    require(report, std::isfinite(tone.amp) && std::isfinite(tone.omega), "forcing",
            "tone amplitude and frequency must be finite");
  }

  const auto& nl = p.nonlinearity;
  const bool active = nl.kind != NonlinearityKind::Passive;
  if (nl.kind == NonlinearityKind::ExpRayleigh) {
    require(report, nl.c > 0.0, "nonlinearity",
            "exp-rayleigh needs c > 0 for a bounded active force");
  }
  if (p.rho_field) {
    require(report, active, "rho-field", "a random gain field needs an active nonlinearity");
    require(report, p.rho_field->mean >= 0.0 && p.rho_field->std >= 0.0, "rho-field",
            "mean and std must be nonnegative");
    require(report, p.rho_field->mean < p.r, "rho-field",
            "mean gain " + num(p.rho_field->mean) + " must stay below r = " + num(p.r));
    if (grid != nullptr && grid->n > 0 && report.ok()) {
      const Vec rho = sample_rho_nodes(p, grid->n);
      const auto count = (rho.array() >= p.r).count();
      report.rho_field_unstable_fraction = static_cast<double>(count) / grid->n;
      if (count > 0) {
        warn(report, "rho-field",
             num(report.rho_field_unstable_fraction) +
                 " of nodes have rho(x) >= r (locally negative effective friction)");
      }
    }
  } else if (active) {
    require(report, nl.rho >= 0.0, "nonlinearity", "rho must be nonnegative");
    require(report, nl.rho < p.r, "nonlinearity",
            "rho = " + num(nl.rho) + " must be strictly below r = " + num(p.r));
  }

  if (p.forcing.tones.empty() && !active && !p.rho_field) {
    warn(report, "forcing", "no forcing and no active term: the solution is trivially zero");
  }

  if (grid != nullptr) {
    const ValidationReport g = validate_grid(*grid);
    report.issues.insert(report.issues.end(), g.issues.begin(), g.issues.end());
  }
  return report;
}

ValidationReport validate_grid(const Grid& g) {
  ValidationReport report;
  require(report, g.n >= 1, "grid", "n must be at least 1");
  require(report, g.nz >= 2, "grid", "nz must be at least 2");
  require(report, g.dt > 0.0, "grid", "dt must be positive");
  require(report, g.t_final >= g.dt, "grid", "t_final must be at least dt");
  require(report, g.snapshot_window > 0.0 && g.snapshot_window <= g.t_final, "grid",
          "snapshot_window must lie in (0, t_final]");
  require(report, g.sample_every >= 1, "grid", "sample_every must be at least 1");
  return report;
}

double resonance_location(const ModelParams& p, double omega) {
  const double target = p.m * omega * omega;
  const auto& s = p.stiffness;
  const double k_right = stiffness_at(s, 1.0);
  if (!(target <= s.k0 && target >= k_right) || s.alpha == 0.0) {
    throw std::domain_error("frequency maps outside cochlea");
  }
  return std::max(0.0, std::log(s.k0 / target) / s.alpha);
}

Vec sample_rho_nodes(const ModelParams& p, int n) {
  if (!p.rho_field) return Vec::Constant(n, p.nonlinearity.rho);
  const RhoField& rf = *p.rho_field;
  std::mt19937_64 rng(rf.seed);
  std::normal_distribution<double> dist(rf.mean, rf.std);
  Vec rho(n);
  for (int j = 0; j < n; ++j) rho(j) = rf.std > 0.0 ? std::max(0.0, dist(rng)) : rf.mean;
  return rho;
}

}  // namespace cochlea

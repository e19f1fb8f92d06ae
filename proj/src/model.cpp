#include "svol/model.hpp"

#include <cmath>
#include <sstream>

#include "svol/moments.hpp"

namespace svol {

const char* to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::Classical: return "svm0";
    case ModelKind::Correlated: return "svmrho";
    case ModelKind::MeanCorrected: return "svmrhomu";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "svm0") return ModelKind::Classical;
  if (s == "svmrho") return ModelKind::Correlated;
  if (s == "svmrhomu") return ModelKind::MeanCorrected;
  throw Error(Errc::ConfigError, "unknown model '" + s + "' (svm0|svmrho|svmrhomu)");
}

const ModelParams& validate(const ModelParams& p) {
  if (!(std::abs(p.phi) < 1.0) || !std::isfinite(p.phi)) {
    std::ostringstream os;
    os << "|phi| must be < 1, got phi=" << p.phi;
    throw Error(Errc::StationarityViolation, os.str());
  }
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    std::ostringstream os;
    os << "sigma must be > 0, got sigma=" << p.sigma;
    throw Error(Errc::NonPositiveSigma, os.str());
  }
  if (!(std::abs(p.rho) < 1.0)) {
    std::ostringstream os;
    os << "rho must lie in (-1,1), got rho=" << p.rho;
    throw Error(Errc::CorrelationOutOfRange, os.str());
  }
  if (!std::isfinite(p.alpha)) {
    throw Error(Errc::KindConstraintViolation, "alpha must be finite");
  }
  if (p.kind == ModelKind::Classical && p.rho != 0.0) {
    std::ostringstream os;
    os << "the classical variant forces rho=0, got rho=" << p.rho;
    throw Error(Errc::KindConstraintViolation, os.str());
  }
  return p;
}

bool is_valid(const ModelParams& p) noexcept {
  try {
    validate(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

double stationary_variance(const ModelParams& p) noexcept {
  return p.sigma * p.sigma / (1.0 - p.phi * p.phi);
}

ConditionalNormal return_conditional(const ModelParams& p, double h_t, double h_prev) {
  const double mu = p.kind == ModelKind::MeanCorrected ? mean_correction(p) : 0.0;
  const double innovation = h_t - p.alpha - p.phi * (h_prev - p.alpha);
  double mean = mu;
  if (p.rho != 0.0) {
    mean += p.rho * std::exp(h_t / 2.0) / p.sigma * innovation;
  }
  return {mean, std::exp(h_t) * (1.0 - p.rho * p.rho)};
}

ConditionalNormal volatility_conditional(const ModelParams& p, double h_prev) noexcept {
  return {p.alpha + p.phi * (h_prev - p.alpha), p.sigma * p.sigma};
}

}  // namespace svol

// SPDX-License-Identifier: Apache-2.0

#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cvcap/montecarlo.hpp"

namespace cvcap::cli {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

using nlohmann::json;

Matrix matrix_from_flat(const json& arr, int dim, const std::string& key) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(dim) * dim) {
    throw InvalidInput("config: '" + key + "' must be a flat array of " +
                       std::to_string(dim * dim) + " numbers");
  }
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const json& v = arr[static_cast<std::size_t>(i) * dim + j];
      if (!v.is_number()) {
        throw InvalidInput("config: '" + key + "' contains a non-numeric entry");
      }
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

void print_matrix(std::ostream& out, const std::string& label, const Matrix& m) {
  out << label << " =\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << format_number(m(i, j));
    }
    out << "\n";
  }
}

void print_vector(std::ostream& out, const std::string& label, const Vector& v) {
  out << label << " =";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << " " << format_number(v(i));
  out << "\n";
}

EnergyConstraint single_energy_constraint(const RunConfig& config) {
  if (!config.energy) {
    throw InvalidInput("config: this command needs an 'energy' value");
  }
  return EnergyConstraint(config.epsilon, *config.energy);
}

GaussianMeasurement measurement_of(const RunConfig& config) {
  return GaussianMeasurement(config.k_matrix, CovarianceMatrix(config.beta));
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  const SymplecticSpace space(config.modes);
  const CovarianceMatrix beta(config.beta);
  const SymplecticSpectrum spec = symplectic_spectrum(beta, space);
  print_vector(out, "beta_symplectic_values", spec.values);
  out << "beta_valid = " << (spec.valid ? "true" : "false") << "\n";
  out << "beta_pure = " << (spec.pure ? "true" : "false") << "\n";

  const GroundState gs = min_energy(config.epsilon, space);
  const SymplecticSpectrum gspec = symplectic_spectrum(gs.covariance, space);
  out << "ground_energy = " << format_number(gs.e_min) << "\n";
  print_vector(out, "ground_symplectic_values", gspec.values);
  out << "ground_pure = " << (gspec.pure ? "true" : "false") << "\n";

  if (!spec.valid) {
    out << "error: beta violates the uncertainty relation\n";
    return kInvalidInput;
  }
  return kOk;
}

int cmd_structure(const RunConfig& config, std::ostream& out) {
  const SymplecticSpace space(config.modes);
  const CovarianceMatrix beta(config.beta);
  const ComplexStructure j = complex_structure(beta, space);
  print_matrix(out, "j_beta", j.matrix());
  print_matrix(out, "squeezed_vacuum", pure_covariance(j, space).matrix());
  const SymplecticBasis basis = symplectic_basis(beta, space);
  print_vector(out, "basis_values", basis.values);
  print_matrix(out, "basis_e", basis.e_vectors);
  print_matrix(out, "basis_h", basis.h_vectors);
  return kOk;
}

int cmd_capacity(const RunConfig& config, bool strict, std::ostream& out) {
  const SymplecticSpace space(config.modes);
  const CapacityResult result =
      capacity(single_energy_constraint(config), measurement_of(config), space);

  print_matrix(out, "alpha_opt", result.alpha_opt.matrix());
  out << "threshold_ok = " << (result.threshold_ok ? "true" : "false") << "\n";
  out << "status = "
      << (result.status == CapacityStatus::kExact ? "exact" : "upper_bound_only")
      << "\n";
  const double value = config.report_bits ? result.capacity_bits : result.capacity_nats;
  const char* unit = config.report_bits ? "bits" : "nats";
  if (result.status == CapacityStatus::kExact) {
    out << "capacity_" << unit << " = " << format_number(value) << "\n";
  } else {
    out << "upper_bound_" << unit << " = " << format_number(value) << "\n";
    out << "threshold_energy = "
        << format_number(
               threshold_energy(config.epsilon, CovarianceMatrix(config.beta), space))
        << "\n";
  }
  if (result.ensemble) {
    print_matrix(out, "ensemble_coherent_covariance",
                 result.ensemble->coherent_covariance.matrix());
    print_matrix(out, "ensemble_mean_covariance", result.ensemble->mean_covariance);
  }
  if (strict && !result.threshold_ok) return kThresholdViolated;
  return kOk;
}

int cmd_sweep(const RunConfig& config, bool strict, std::ostream& out) {
  if (!config.sweep) {
    throw InvalidInput("config: 'sweep' needs an 'energy_sweep' object");
  }
  const EnergySweep& sw = *config.sweep;
  const SymplecticSpace space(config.modes);
  const GaussianMeasurement m = measurement_of(config);
  const GroundState gs = min_energy(config.epsilon, space);

  out << "energy,e_min,threshold_ok,capacity_nats,capacity_bits,logdet_out,"
         "logdet_min,status\n";
  bool any_violated = false;
  for (int i = 0; i < sw.steps; ++i) {
    const double energy =
        sw.start + (sw.stop - sw.start) * i / static_cast<double>(sw.steps - 1);
    out << format_number(energy) << "," << format_number(gs.e_min) << ",";
    if (energy < gs.e_min - 1e-12 * std::max(1.0, std::abs(gs.e_min))) {
      out << "0,nan,nan,nan,nan,infeasible\n";
      continue;
    }
    const CapacityResult r =
        capacity(EnergyConstraint(config.epsilon, energy), m, space);
    if (!r.threshold_ok) any_violated = true;
    out << (r.threshold_ok ? 1 : 0) << "," << format_number(r.capacity_nats)
        << "," << format_number(r.capacity_bits) << ","
        << format_number(r.logdet_output) << ","
        << format_number(r.logdet_min_output) << ","
        << (r.status == CapacityStatus::kExact ? "exact" : "upper_bound_only")
        << "\n";
  }
  if (strict && any_violated) return kThresholdViolated;
  return kOk;
}

int cmd_simulate(const RunConfig& config, bool, std::ostream& out) {
  const SymplecticSpace space(config.modes);
  const GaussianMeasurement m = measurement_of(config);
  const CapacityResult result =
      capacity(single_energy_constraint(config), m, space);
  if (result.status != CapacityStatus::kExact || !result.ensemble) {
    out << "error: threshold condition fails; the optimal ensemble is not "
           "defined (threshold_energy = "
        << format_number(threshold_energy(config.epsilon,
                                          CovarianceMatrix(config.beta), space))
        << ")\n";
    return kThresholdViolated;
  }

  const GaussianCoherentEnsemble ensemble(result.ensemble->coherent_covariance,
                                          result.ensemble->mean_covariance);
  const ChannelSamples samples =
      simulate_ensemble(ensemble, m, space, config.samples, config.seed);
  const MiEstimate mi = mi_plugin_with_stderr(samples);

  out << "n,seed,mi_estimate_nats,mi_stderr_nats,capacity_nats,abs_gap_nats\n";
  out << config.samples << "," << config.seed << ","
      << format_number(mi.estimate) << "," << format_number(mi.std_error) << ","
      << format_number(result.capacity_nats) << ","
      << format_number(std::abs(mi.estimate - result.capacity_nats)) << "\n";
  return kOk;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) {
    throw InvalidInput("config: top level must be an object");
  }

  static const char* known[] = {"modes",  "epsilon",      "beta",
                                "k_matrix", "energy",     "energy_sweep",
                                "samples", "seed",        "log_base"};
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidInput("config: unknown key '" + key + "'");
  }

  RunConfig config;
  if (!doc.contains("modes") || !doc["modes"].is_number_integer() ||
      doc["modes"].get<int>() < 1) {
    throw InvalidInput("config: 'modes' must be a positive integer");
  }
  config.modes = doc["modes"].get<int>();
  const int dim = 2 * config.modes;

  if (!doc.contains("epsilon") || !doc.contains("beta")) {
    throw InvalidInput("config: 'epsilon' and 'beta' are required");
  }
  config.epsilon = matrix_from_flat(doc["epsilon"], dim, "epsilon");
  config.beta = matrix_from_flat(doc["beta"], dim, "beta");
  config.k_matrix = doc.contains("k_matrix")
                        ? matrix_from_flat(doc["k_matrix"], dim, "k_matrix")
                        : Matrix::Identity(dim, dim);

  if (doc.contains("energy")) {
    if (!doc["energy"].is_number()) {
      throw InvalidInput("config: 'energy' must be a number");
    }
    config.energy = doc["energy"].get<double>();
  }
  if (doc.contains("energy_sweep")) {
    const json& sw = doc["energy_sweep"];
    if (!sw.is_object() || !sw.contains("start") || !sw.contains("stop") ||
        !sw.contains("steps")) {
      throw InvalidInput("config: 'energy_sweep' needs start, stop, steps");
    }
    EnergySweep sweep{sw["start"].get<double>(), sw["stop"].get<double>(),
                      sw["steps"].get<int>()};
    if (!(sweep.start < sweep.stop) || sweep.steps < 2) {
      throw InvalidInput("config: sweep needs start < stop and steps >= 2");
    }
    config.sweep = sweep;
  }
  if (doc.contains("samples")) {
    if (!doc["samples"].is_number_unsigned() || doc["samples"].get<std::uint64_t>() == 0) {
      throw InvalidInput("config: 'samples' must be a positive integer");
    }
    config.samples = doc["samples"].get<std::size_t>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw InvalidInput("config: 'seed' must be a nonnegative integer");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("log_base")) {
    const std::string base = doc["log_base"].get<std::string>();
    if (base == "2") {
      config.report_bits = true;
    } else if (base == "e") {
      config.report_bits = false;
    } else {
      throw InvalidInput("config: 'log_base' must be \"2\" or \"e\"");
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

int run_command(const std::string& command, const RunConfig& config,
                bool strict, std::ostream& out) {
  try {
    if (command == "validate") return cmd_validate(config, out);
    if (command == "structure") return cmd_structure(config, out);
    if (command == "capacity") return cmd_capacity(config, strict, out);
    if (command == "sweep") return cmd_sweep(config, strict, out);
    if (command == "simulate") return cmd_simulate(config, strict, out);
    throw InvalidInput("unknown command: " + command);
  } catch (const InfeasibleEnergy& e) {
    out << "error: " << e.what() << "\n";
    return kInfeasibleEnergy;
  } catch (const ThresholdViolation& e) {
    out << "error: " << e.what() << "\n";
    return kThresholdViolated;
  } catch (const ConvergenceFailure& e) {
    out << "error: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const InvalidInput& e) {
    out << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kNoConvergence;
  }
}

}  // namespace cvcap::cli

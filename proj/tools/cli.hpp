#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "reslat/quantization.hpp"
#include "table.hpp"

namespace reslat::cli {

enum class Refine { lattice, bs, ode };

struct SweepConfig {
  std::vector<double> h{0.01};
  double nu_tilde_min = 0.5;
  double nu_tilde_max = 0.5;
  std::optional<Band> band;
  std::optional<std::pair<int, int>> k_range;
  Refine refine = Refine::lattice;
  LatticeVariant lattice = LatticeVariant::stated;
  std::vector<Complex> seeds;
  unsigned threads = 0;
};

struct SweepRow {
  double h;
  ResonanceRecord record;
};

std::vector<double> log_spaced(double lo, double hi, int n);
std::vector<SweepRow> resonance_sweep(const SweepConfig& cfg);

Table turning_points_table(Complex E, double nu);
Table actions_table(Complex E, double nu, std::optional<double> h, int l, double tol);
Table resonances_table(const SweepConfig& cfg, const std::vector<SweepRow>& rows);
Table verify_ode_table(double h, double nu_tilde, int k, double theta);
Table pplus_table(double h, int l, int kmax, bool oracle);

// Re λ / Im λ per ν̃ series, sorted by (ν̃, h, k).
void write_figure_data(const std::vector<SweepRow>& rows, std::ostream& os);
void write_figure_script(const std::string& data_path, const std::vector<double>& nu_tildes, std::ostream& os);

// Exit codes: 0 success, 2 usage, 3 numeric failure, 4 partial.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reslat::cli

#pragma once

#include <map>
#include <string>
#include <vector>

#include "lqed/driven.hpp"
#include "lqed/models.hpp"
#include "lqed/scaling.hpp"

namespace lqed {

// "5mhz", "120 Hz", "2.5e3" (plain numbers are Hz) -> rad/s.
double parse_frequency(const std::string& s);
// "40pi", "4*pi", "pi/2", "12.5" -> plain number.
double parse_time(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);
bool parse_switch(const std::string& s);

// Quench from the string state of an open chain. Gauss violation is read off
// the unprojected closure basis, so it is a genuine check of the model.
struct QuenchTrace {
  std::vector<double> t;
  std::vector<double> E;
  double gauss_max = 0.0;
  double norm_drift = 0.0;
  std::size_t dim = 0;
};

// N = 0 selects QED with a cutoff that never clips the string sector.
// extra_diag, if non-empty, is added to the diagonal (HOBM only).
QuenchTrace string_quench(int L, int N, const ModelParams& p, const std::vector<double>& times,
                          const ShiftCatalog* catalog = nullptr, double energy_unit = 1.0);

// Linear-fit slope over the second half of the window times the half-window
// length, relative to the mean there. Small values mean no growth trend.
double trend_ratio(const std::vector<double>& t, const std::vector<double>& y);

struct ColemanStudy {
  std::vector<int> Ls;
  std::vector<int> Ns;
  std::map<std::pair<int, int>, ScanResult> scans;  // (L, N), N = 0 for QED
  std::map<std::pair<int, int>, double> h_pc;
  std::map<std::pair<int, int>, double> order_at_mc;
  std::vector<CollapseScore> scores;
};

ColemanStudy coleman_study(const std::vector<int>& Ls, const std::vector<int>& Ns, double ga, double mc,
                           const std::vector<double>& h_grid, int workers, const Exponents& nominal = {});

// Entry point of the lqed binary; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace lqed

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "reslat/actions.hpp"
#include "reslat/model.hpp"
#include "reslat/ode_oracle.hpp"
#include "reslat/parallel.hpp"

namespace reslat::cli {

using nlohmann::ordered_json;

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) fail(ErrorKind::invalid_argument, "log range needs 0 < lo <= hi and n >= 1");
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
  return out;
}

namespace {

std::vector<double> nu_tilde_values(double lo, double hi) {
  if (!is_half_integer(lo) || !is_half_integer(hi) || lo <= 0.0 || hi < lo)
    fail(ErrorKind::invalid_argument, "nu_tilde range must be half-integers with 0 < min <= max");
  std::vector<double> out;
  for (double nt = lo; nt <= hi + 1e-9; nt += 1.0) out.push_back(nt);
  return out;
}

ResonanceRecord lattice_record(int k, double nt, double h, LatticeVariant v) {
  ResonanceRecord r;
  r.k = k;
  r.nu_tilde = nt;
  r.lambda_lat = r.lambda = lattice_lambda(k, nt, h, v);
  r.E = std::pow(r.lambda, 2.0 / 3.0);
  r.method = "lattice";
  return r;
}

std::string refine_name(Refine r) {
  switch (r) {
    case Refine::lattice: return "lattice";
    case Refine::bs: return "bs";
    case Refine::ode: return "ode";
  }
  return "";
}

}  // namespace

std::vector<SweepRow> resonance_sweep(const SweepConfig& cfg) {
  if (cfg.h.empty()) fail(ErrorKind::invalid_argument, "no h values");
  if (!cfg.seeds.empty() && cfg.refine == Refine::lattice)
    fail(ErrorKind::invalid_argument, "seeds need --refine bs or ode");
  std::vector<SweepRow> jobs;
  std::vector<std::optional<Complex>> seed_of;
  for (double h : cfg.h) {
    if (!(h > 0.0)) fail(ErrorKind::invalid_argument, "h must be positive");
    for (double nt : nu_tilde_values(cfg.nu_tilde_min, cfg.nu_tilde_max)) {
      if (!cfg.seeds.empty()) {
        for (Complex s : cfg.seeds) {
          const int k = nearest_branch(bs_condition(s, h, nt).A);
          jobs.push_back({h, lattice_record(k, nt, h, cfg.lattice)});
          seed_of.push_back(s);
        }
      } else if (cfg.k_range) {
        for (int k = cfg.k_range->first; k <= cfg.k_range->second; ++k) {
          jobs.push_back({h, lattice_record(k, nt, h, cfg.lattice)});
          seed_of.push_back(std::nullopt);
        }
      } else {
        try {
          for (const auto& r : lattice(nt, h, cfg.band.value_or(Band{}), cfg.lattice)) {
            jobs.push_back({h, r});
            seed_of.push_back(std::nullopt);
          }
        } catch (const NumericError& e) {
          if (e.kind() != ErrorKind::empty_band) throw;
        }
      }
    }
  }
  if (jobs.empty()) fail(ErrorKind::empty_band, "no lattice point in the band for any nu_tilde");
  if (cfg.refine == Refine::lattice) return jobs;

  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        SweepRow& row = jobs[i];
        const ResonanceRecord lat = row.record;
        const Complex seed = seed_of[i].value_or(lat.E);
        SolveOptions opt;
        opt.seed_lattice = cfg.lattice;
        try {
          ResonanceRecord bs = solve_resonance(lat.k, lat.nu_tilde, row.h, seed, opt);
          if (cfg.refine == Refine::ode) {
            const OdeResonance o = find_resonance_ode(lat.k, lat.nu_tilde, row.h, bs.E);
            row.record = o.record;
          } else {
            row.record = bs;
          }
        } catch (const NumericError& e) {
          row.record.method = cfg.refine == Refine::ode ? "ode-oracle" : "bs-newton";
          row.record.error = e.what();
        }
        row.record.lambda_lat = lat.lambda_lat;
      },
      cfg.threads);
  return jobs;
}

Table turning_points_table(Complex E, double nu) {
  const TurningPoints tp = turning_points(E, nu);
  Table t;
  t.command = "turning-points";
  t.params = {{"E", complex_json(E)}, {"nu", nu}};
  t.columns = {{"j", ColumnKind::integer},          {"x", ColumnKind::complex},
               {"r", ColumnKind::complex},          {"g_sign", ColumnKind::integer},
               {"residual_x", ColumnKind::real},    {"residual_r", ColumnKind::real},
               {"D3", ColumnKind::complex},         {"degenerate", ColumnKind::boolean}};
  for (int j = 0; j < 3; ++j) {
    const Complex x = tp.x[j], r = tp.r[j];
    const double rx = std::abs(x * x * x - 2.0 * E * x * x + E * E * x - nu * nu);
    const double rr = std::abs(r * (r * r - E) + static_cast<double>(tp.g_sign[j]) * nu);
    t.rows.push_back({static_cast<long long>(j), x, r, static_cast<long long>(tp.g_sign[j]), rx, rr, tp.D3,
                      tp.degenerate});
  }
  return t;
}

Table actions_table(Complex E, double nu, std::optional<double> h, int l, double tol) {
  ActionOptions opt;
  opt.tol = tol;
  Table t;
  t.command = "actions";
  t.params = {{"E", complex_json(E)}, {"nu", nu}, {"tol", tol}};
  t.columns = {{"name", ColumnKind::text},
               {"value", ColumnKind::complex},
               {"est_error", ColumnKind::real},
               {"n_evals", ColumnKind::integer}};
  auto add = [&](const std::string& name, const ActionValue& v) {
    t.rows.push_back({name, v.value, v.est_error, static_cast<long long>(v.n_evals)});
  };
  add("S01", action_S01(E, nu, opt));
  add("dS01_dE", action_S01_dE(E, nu, opt));
  add("S2inf", action_S2inf(E, nu, opt));
  if (h) {
    if (E.imag() != 0.0) fail(ErrorKind::invalid_argument, "S12 needs real E");
    t.params["h"] = *h;
    t.params["l"] = l;
    add("S12", action_S12(E.real(), *h, l, opt));
  }
  return t;
}

Table resonances_table(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  Table t;
  t.command = "resonances";
  t.params = {{"h", cfg.h},
              {"nu_tilde_min", cfg.nu_tilde_min},
              {"nu_tilde_max", cfg.nu_tilde_max},
              {"refine", refine_name(cfg.refine)},
              {"lattice", std::string(to_string(cfg.lattice))}};
  if (cfg.band) t.params["band"] = {cfg.band->a, cfg.band->b};
  if (cfg.k_range) t.params["k_range"] = {cfg.k_range->first, cfg.k_range->second};
  if (!cfg.seeds.empty()) {
    ordered_json s = ordered_json::array();
    for (Complex z : cfg.seeds) s.push_back(complex_json(z));
    t.params["seeds"] = s;
  }
  t.columns = {{"h", ColumnKind::real},          {"nu_tilde", ColumnKind::real},  {"k", ColumnKind::integer},
               {"method", ColumnKind::text},     {"lambda_lat", ColumnKind::complex},
               {"lambda", ColumnKind::complex},  {"E", ColumnKind::complex},      {"residual", ColumnKind::real},
               {"iterations", ColumnKind::integer}, {"error", ColumnKind::text}};
  for (const auto& [h, r] : rows) {
    const bool ok = r.error.empty();
    t.rows.push_back({h, r.nu_tilde, static_cast<long long>(r.k), r.method, r.lambda_lat,
                      ok ? Cell(r.lambda) : Cell(), ok ? Cell(r.E) : Cell(), r.residual,
                      static_cast<long long>(r.iterations), r.error});
  }
  return t;
}

Table verify_ode_table(double h, double nu_tilde, int k, double theta) {
  Table t;
  t.command = "verify-ode";
  t.params = {{"h", h}, {"nu_tilde", nu_tilde}, {"k", k}, {"theta", theta}};
  t.columns = {{"k", ColumnKind::integer},
               {"nu_tilde", ColumnKind::real},
               {"h", ColumnKind::real},
               {"lambda_lat", ColumnKind::complex},
               {"lambda_lat_corrected", ColumnKind::complex},
               {"lambda_bs", ColumnKind::complex},
               {"lambda_ode", ColumnKind::complex},
               {"ode_bs_gap_over_h", ColumnKind::real},
               {"winding", ColumnKind::integer},
               {"wronskian_drift", ColumnKind::real},
               {"plateau_error", ColumnKind::real},
               {"c_plus_ratio", ColumnKind::real},
               {"error", ColumnKind::text}};
  const ResonanceRecord bs = solve_resonance(k, nu_tilde, h);
  FindOptions fo;
  fo.jost.theta = theta;
  const OdeResonance o = find_resonance_ode(k, nu_tilde, h, bs.E, fo);
  t.rows.push_back({static_cast<long long>(k), nu_tilde, h, lattice_lambda(k, nu_tilde, h, LatticeVariant::stated),
                    lattice_lambda(k, nu_tilde, h, LatticeVariant::sign_corrected), bs.lambda, o.record.lambda,
                    std::abs(o.record.lambda - bs.lambda) / h, static_cast<long long>(o.winding), o.wronskian_drift,
                    o.plateau_error, o.record.residual, o.record.error});
  return t;
}

Table pplus_table(double h, int l, int kmax, bool oracle) {
  Table t;
  t.command = "pplus";
  t.params = {{"h", h}, {"l", l}, {"kmax", kmax}, {"oracle", oracle}};
  t.columns = {{"k", ColumnKind::integer},        {"l", ColumnKind::integer},      {"h", ColumnKind::real},
               {"E_pred", ColumnKind::real},      {"bs_residual", ColumnKind::real},
               {"E_oracle", ColumnKind::real},    {"delta", ColumnKind::real},     {"note", ColumnKind::text}};
  const auto pred = pplus_levels(h, l, kmax);
  const double c = std::sqrt(l * l - 0.25);
  std::vector<double> ev;
  if (oracle && !pred.empty()) ev = pplus_eigen_oracle(l, h, 1e-3 * pred.front(), 1.2 * pred.back() + 4.0 * h);
  std::size_t i = 0;
  for (int k = 0; k <= kmax; ++k) {
    if (2.0 * k + 1.0 - c <= 0.0) continue;
    const double E = pred[i++];
    std::vector<Cell> row{static_cast<long long>(k), static_cast<long long>(l), h, E};
    std::string note;
    try {
      row.emplace_back(pplus_residual(E, h, l));
    } catch (const NumericError& e) {
      row.emplace_back();
      note = e.what();
    }
    if (!ev.empty()) {
      const double near = *std::min_element(ev.begin(), ev.end(), [&](double a, double b) {
        return std::abs(a - E) < std::abs(b - E);
      });
      row.emplace_back(near);
      row.emplace_back(near - E);
    } else {
      row.emplace_back();
      row.emplace_back();
    }
    row.emplace_back(note);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_figure_data(const std::vector<SweepRow>& rows, std::ostream& os) {
  std::vector<const SweepRow*> ok;
  for (const auto& r : rows)
    if (r.record.error.empty()) ok.push_back(&r);
  std::stable_sort(ok.begin(), ok.end(), [](const SweepRow* a, const SweepRow* b) {
    if (a->record.nu_tilde != b->record.nu_tilde) return a->record.nu_tilde < b->record.nu_tilde;
    if (a->h != b->h) return a->h < b->h;
    return a->record.k < b->record.k;
  });
  os << "nu_tilde,h,k,lambda_re,lambda_im\n";
  for (const SweepRow* r : ok)
    os << format_double(r->record.nu_tilde) << ',' << format_double(r->h) << ',' << r->record.k << ','
       << format_double(r->record.lambda.real()) << ',' << format_double(r->record.lambda.imag()) << '\n';
}

void write_figure_script(const std::string& data_path, const std::vector<double>& nu_tildes, std::ostream& os) {
  os << "set datafile separator ','\n"
     << "set xlabel 'Re lambda'\nset ylabel 'Im lambda'\nset key bottom right\n"
     << "plot \\\n";
  for (std::size_t i = 0; i < nu_tildes.size(); ++i) {
    const std::string nt = format_double(nu_tildes[i]);
    os << "  '" << data_path << "' skip 1 using 4:($1==" << nt << "?$5:1/0) with points title 'nu~ = " << nt << "'"
       << (i + 1 < nu_tildes.size() ? ", \\\n" : "\n");
  }
}

namespace {

std::vector<Complex> read_seeds(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::invalid_argument, "cannot open seed file " + path);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) fail(ErrorKind::invalid_argument, "seed file must hold a JSON array");
  std::vector<Complex> out;
  for (const auto& v : j) {
    if (v.is_number()) out.emplace_back(v.get<double>(), 0.0);
    else if (v.is_object() && v.contains("re") && v.contains("im"))
      out.emplace_back(v["re"].get<double>(), v["im"].get<double>());
    else fail(ErrorKind::invalid_argument, "seeds are numbers or {\"re\",\"im\"} objects");
  }
  if (out.empty()) fail(ErrorKind::invalid_argument, "seed file is empty");
  return out;
}

void emit(const Table& t, const std::string& format, const std::string& out_path, std::ostream& out) {
  std::ofstream file;
  std::ostream* os = &out;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) fail(ErrorKind::invalid_argument, "cannot write " + out_path);
    os = &file;
  }
  if (format == "csv") write_csv(t, *os);
  else write_json(t, *os);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resonances of a two-level Schrodinger operator with a conical crossing"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  app.fallthrough();
  std::string format = "json", out_path;
  unsigned threads = 0;
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--threads", threads, "worker threads (0: RES_LAT_THREADS or hardware)");

  double E_re = 1.0, E_im = 0.0, nu = 0.0, tol = 1e-10;
  auto* tp = app.add_subcommand("turning-points", "roots of the turning-point cubics");
  tp->set_help_flag("--help", "print help");
  tp->add_option("--E", E_re)->required();
  tp->add_option("--E-im", E_im);
  tp->add_option("--nu", nu)->required();

  std::optional<double> act_h;
  int l = 1;
  auto* act = app.add_subcommand("actions", "S01, dS01/dE, S2inf and optionally S12");
  act->set_help_flag("--help", "print help");
  act->add_option("--E", E_re)->required();
  act->add_option("--E-im", E_im);
  act->add_option("--nu", nu)->required();
  act->add_option("--h", act_h, "also evaluate S12 at this h");
  act->add_option("--l", l);
  act->add_option("--tol", tol)->check(CLI::PositiveNumber);

  SweepConfig cfg;
  double h = 0.01;
  std::vector<double> band, h_range;
  std::vector<int> k_range;
  std::string refine = "lattice", variant = "stated", seed_file, fig_data, fig_script;
  auto* res = app.add_subcommand("resonances", "lattice and refined resonance tables");
  res->set_help_flag("--help", "print help");
  auto* h_opt = res->add_option("--h", h)->check(CLI::PositiveNumber);
  res->add_option("--h-range", h_range, "lo,hi,n log-spaced")->delimiter(',')->expected(3)->excludes(h_opt);
  res->add_option("--nutilde-min", cfg.nu_tilde_min);
  res->add_option("--nutilde-max", cfg.nu_tilde_max);
  auto* band_opt = res->add_option("--band", band, "a,b window for Re lambda")->delimiter(',')->expected(2);
  res->add_option("--k-range", k_range, "kmin,kmax")->delimiter(',')->expected(2)->excludes(band_opt);
  res->add_option("--refine", refine)->check(CLI::IsMember({"lattice", "bs", "ode"}));
  res->add_option("--lattice", variant)->check(CLI::IsMember({"stated", "sign_corrected"}));
  res->add_option("--seed-file", seed_file, "JSON array of E seeds");
  res->add_option("--figure-data", fig_data, "write Re/Im lambda per nu~ as CSV");
  res->add_option("--figure-script", fig_script, "write a gnuplot script for the figure data");

  double nt = 0.5, theta = 0.5;
  int k = 0;
  auto* ver = app.add_subcommand("verify-ode", "ODE oracle against BS and lattice");
  ver->set_help_flag("--help", "print help");
  ver->add_option("--h", h)->required()->check(CLI::PositiveNumber);
  ver->add_option("--nutilde", nt)->required();
  ver->add_option("--k", k)->required();
  ver->add_option("--theta", theta);

  int kmax = 3;
  bool oracle = false;
  auto* pp = app.add_subcommand("pplus", "upper-level eigenvalue predictions");
  pp->set_help_flag("--help", "print help");
  pp->add_option("--h", h)->required()->check(CLI::PositiveNumber);
  pp->add_option("--l", l)->required();
  pp->add_option("--kmax", kmax);
  pp->add_flag("--oracle", oracle, "add shooting-oracle eigenvalues");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (tp->parsed()) {
      emit(turning_points_table({E_re, E_im}, nu), format, out_path, out);
    } else if (act->parsed()) {
      emit(actions_table({E_re, E_im}, nu, act_h, l, tol), format, out_path, out);
    } else if (res->parsed()) {
      cfg.h = h_range.empty() ? std::vector<double>{h}
                              : log_spaced(h_range[0], h_range[1], static_cast<int>(std::lround(h_range[2])));
      if (!band.empty()) cfg.band = Band{band[0], band[1]};
      if (!k_range.empty()) cfg.k_range = std::pair{k_range[0], k_range[1]};
      cfg.refine = refine == "bs" ? Refine::bs : refine == "ode" ? Refine::ode : Refine::lattice;
      cfg.lattice = variant == "sign_corrected" ? LatticeVariant::sign_corrected : LatticeVariant::stated;
      if (!seed_file.empty()) cfg.seeds = read_seeds(seed_file);
      cfg.threads = threads;
      const auto rows = resonance_sweep(cfg);
      emit(resonances_table(cfg, rows), format, out_path, out);
      if (!fig_data.empty()) {
        std::ofstream f(fig_data);
        write_figure_data(rows, f);
        if (!fig_script.empty()) {
          std::ofstream s(fig_script);
          write_figure_script(fig_data, nu_tilde_values(cfg.nu_tilde_min, cfg.nu_tilde_max), s);
        }
      }
      const auto ok = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.record.error.empty(); });
      if (ok == 0) {
        err << "no resonance converged\n";
        return 3;
      }
    } else if (ver->parsed()) {
      const Table t = verify_ode_table(h, nt, k, theta);
      emit(t, format, out_path, out);
      if (!std::get<std::string>(t.rows.front().back()).empty()) return 4;
    } else if (pp->parsed()) {
      const Table t = pplus_table(h, l, kmax, oracle);
      emit(t, format, out_path, out);
      const bool partial = std::any_of(t.rows.begin(), t.rows.end(),
                                       [](const auto& r) { return !std::get<std::string>(r.back()).empty(); });
      if (partial) return 4;
    }
  } catch (const NumericError& e) {
    err << e.what() << '\n';
    return e.kind() == ErrorKind::invalid_argument ? 2 : 3;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace reslat::cli

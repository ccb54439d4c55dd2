// Command-line front end: every subcommand is a thin composition of library
// calls; all numeric logic lives in the headers. Exit codes: 0 success,
// 1 invalid usage/domain, 2 numerical failure (failing stage on stderr).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rmem/rmem.hpp"

namespace {

using rmem::json;

struct CommonFlags {
  double c0 = 0.0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double sigma0 = 0.0;
  double z_cutoff_factor = 1e-6;
  double sigma_max = 0.0;

  rmem::ModelParams params() const {
    rmem::ModelParams p;
    p.c0 = c0;
    p.abs_tol = abs_tol;
    p.rel_tol = rel_tol;
    p.sigma0 = sigma0;
    p.z_cutoff_factor = z_cutoff_factor;
    p.sigma_max = sigma_max;
    return p;
  }

  json params_json() const {
    return json{{"c0", c0},
                {"abs_tol", abs_tol},
                {"rel_tol", rel_tol},
                {"sigma0", sigma0},
                {"z_cutoff_factor", z_cutoff_factor},
                {"sigma_max", sigma_max}};
  }
};

void add_numeric_flags(CLI::App* app, CommonFlags& f, bool need_c0) {
  auto* opt = app->add_option("--c0", f.c0, "spontaneous curvature (>= 0)");
  if (need_c0) opt->required();
  app->add_option("--abs-tol", f.abs_tol, "integrator absolute tolerance");
  app->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance");
  app->add_option("--sigma0", f.sigma0, "pole start offset (0 = automatic)");
  app->add_option("--z-cutoff-factor", f.z_cutoff_factor,
                  "boundary variable-switch height as a fraction of z0");
  app->add_option("--sigma-max", f.sigma_max, "arc length cap (0 = automatic)");
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    rmem::write_json(j, out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axisymmetric reduced-membrane equilibria and renormalized energies"};
  app.require_subcommand(1);

  // --- integrate ---
  CommonFlags fi;
  double i_z0 = 0.0;
  std::string i_out;
  auto* cmd_integrate = app.add_subcommand("integrate", "integrate one generating curve");
  add_numeric_flags(cmd_integrate, fi, true);
  cmd_integrate->add_option("--z0", i_z0, "initial height (nonzero)")->required();
  cmd_integrate->add_option("--out", i_out, "profile CSV path (default: stdout)");

  // --- scan ---
  CommonFlags fs;
  double s_zmin = 0.0, s_zmax = 0.0;
  int s_samples = 0;
  std::string s_out;
  auto* cmd_scan = app.add_subcommand("scan", "scan equilibrium residuals over a z0 range");
  add_numeric_flags(cmd_scan, fs, true);
  cmd_scan->add_option("--zmin", s_zmin, "scan range start")->required();
  cmd_scan->add_option("--zmax", s_zmax, "scan range end")->required();
  cmd_scan->add_option("--samples", s_samples, "number of log-spaced samples (>= 2)")->required();
  cmd_scan->add_option("--out", s_out, "residual CSV path (default: stdout)");

  // --- find ---
  CommonFlags ff;
  int f_count = 0;
  std::string f_out;
  auto* cmd_find = app.add_subcommand("find", "locate equilibria of -G_R");
  add_numeric_flags(cmd_find, ff, true);
  cmd_find->add_option("--count", f_count, "number of equilibria (>= 1)")->required();
  cmd_find->add_option("--out", f_out, "branch JSON path (default: stdout)");

  // --- energy ---
  CommonFlags fe;
  double e_z0 = 0.0;
  bool e_both = false;
  std::string e_profile, e_out;
  auto* cmd_energy = app.add_subcommand("energy", "renormalized energies of one surface");
  add_numeric_flags(cmd_energy, fe, false);
  auto* e_z0_opt = cmd_energy->add_option("--z0", e_z0, "initial height (integrate then evaluate)");
  cmd_energy->add_option("--profile", e_profile, "profile CSV to evaluate");
  cmd_energy->add_flag("--both-methods", e_both,
                       "also report the counterterm-limit value of A_R");
  cmd_energy->add_option("--out", e_out, "energy report JSON path (default: stdout)");
  double eh_R = 0.0, eh_c0 = 0.0;
  bool eh_both = false;
  std::string eh_out;
  auto* cmd_energy_hemi =
      cmd_energy->add_subcommand("hemisphere", "energies of the closed-form hemisphere");
  cmd_energy_hemi->add_option("--R", eh_R, "hemisphere radius (> 0)")->required();
  cmd_energy_hemi->add_option("--c0", eh_c0, "spontaneous curvature (>= 0)")->required();
  cmd_energy_hemi->add_flag("--both-methods", eh_both,
                            "also report the counterterm-limit value of A_R");
  cmd_energy_hemi->add_option("--out", eh_out, "energy report JSON path (default: stdout)");

  // --- verify ---
  CommonFlags fv;
  double v_z0 = 0.0;
  std::string v_out;
  auto* cmd_verify = app.add_subcommand("verify", "pointwise/boundary certification of a profile");
  add_numeric_flags(cmd_verify, fv, true);
  cmd_verify->add_option("--z0", v_z0, "initial height (nonzero)")->required();
  cmd_verify->add_option("--out", v_out, "verification JSON path (default: stdout)");

  // --- export ---
  CommonFlags fx;
  double x_z0 = 0.0;
  int x_ntheta = 96, x_nsigma = 64;
  bool x_reflect = false, x_ball = false;
  std::string x_out;
  auto* cmd_export = app.add_subcommand("export", "triangulated surface of revolution (OBJ)");
  add_numeric_flags(cmd_export, fx, true);
  cmd_export->add_option("--z0", x_z0, "initial height (nonzero)")->required();
  cmd_export->add_option("--ntheta", x_ntheta, "angular resolution (>= 3)");
  cmd_export->add_option("--nsigma", x_nsigma, "meridian resolution (>= 2)");
  cmd_export->add_flag("--reflect", x_reflect, "double across {z=0} into a closed surface");
  cmd_export->add_flag("--ball", x_ball, "map vertices to the unit-ball model");
  cmd_export->add_option("--out", x_out, "OBJ path")->required();

  // --- oracle ---
  auto* cmd_oracle = app.add_subcommand("oracle", "closed-form reference values");
  double o_R = 0.0, o_c0 = 0.0;
  std::string o_out;
  auto* cmd_oracle_hemi = cmd_oracle->add_subcommand("hemisphere", "hemisphere energy oracle");
  cmd_oracle_hemi->add_option("--R", o_R, "hemisphere radius (> 0)")->required();
  cmd_oracle_hemi->add_option("--c0", o_c0, "spontaneous curvature (>= 0)")->required();
  cmd_oracle_hemi->add_option("--out", o_out, "energy report JSON path (default: stdout)");
  cmd_oracle->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  std::string stage = "setup";
  try {
    if (cmd_integrate->parsed()) {
      stage = "integrate";
      auto sol = rmem::integrate_profile(fi.params(), i_z0);
      rmem::require(sol.hit_boundary(), rmem::errc::step_failure,
                    std::string("integration terminated with ") +
                        rmem::termination_name(sol.termination));
      if (i_out.empty())
        std::cout << rmem::profile_csv_string(sol);
      else
        rmem::write_profile_csv(sol, i_out);
    } else if (cmd_scan->parsed()) {
      stage = "scan";
      const auto res = rmem::scan_brackets(fs.params(), s_zmin, s_zmax, s_samples);
      if (res.degenerate_c0_zero) {
        std::cout << json{{"degenerate_c0_zero", true},
                          {"note", "every z0 > 0 is an equilibrium hemisphere at c0 = 0"},
                          {"params", fs.params_json()}}
                         .dump(2)
                  << "\n";
        return 0;
      }
      rmem::ResidualTable table;
      for (const auto& s : res.samples) {
        rmem::ResidualRow row;
        row.z0 = s.z0;
        row.ok = s.ok;
        row.reason = s.reason;
        row.residual_mean = s.residual;
        if (s.ok) row.residual_phi2 = rmem::residual_phi2(fs.params(), s.z0);
        table.rows.push_back(row);
      }
      for (const auto& s : res.samples)
        if (!s.ok) std::cerr << "skipped z0=" << s.z0 << ": " << s.reason << "\n";
      if (s_out.empty())
        std::cout << rmem::residual_csv_string(table);
      else
        rmem::write_residual_csv(table, s_out);
      std::cerr << "brackets found: " << res.brackets.size() << "\n";
    } else if (cmd_find->parsed()) {
      stage = "find";
      const auto entries = rmem::find_equilibria(ff.params(), f_count);
      json j = rmem::branch_json(entries);
      emit(j, f_out);
      std::cerr << json{{"params", ff.params_json()}}.dump() << "\n";
    } else if (cmd_energy_hemi->parsed()) {
      stage = "energy-hemisphere";
      const auto surf = rmem::AxisymmetricSurface::hemisphere(eh_R, eh_c0);
      const auto rep = rmem::compute_energies(surf);
      json j = rmem::energy_json(rep);
      if (eh_both) j["A_R_limit"] = rmem::area_regularized(surf).limit_value;
      emit(j, eh_out);
    } else if (cmd_energy->parsed()) {
      stage = "energy";
      rmem::AxisymmetricSurface surf = [&] {
        if (!e_profile.empty()) {
          const auto parsed = rmem::read_profile_csv(e_profile);
          return rmem::AxisymmetricSurface::from_samples(parsed.rows, parsed.c0);
        }
        rmem::require(static_cast<bool>(*e_z0_opt), rmem::errc::invalid_argument,
                      "energy needs --profile, --z0, or the hemisphere subcommand");
        return rmem::AxisymmetricSurface::from_profile(
            rmem::integrate_profile(fe.params(), e_z0));
      }();
      json j = rmem::energy_json(rmem::compute_energies(surf));
      if (e_both) j["A_R_limit"] = rmem::area_regularized(surf).limit_value;
      emit(j, e_out);
    } else if (cmd_verify->parsed()) {
      stage = "verify";
      const auto sol = rmem::integrate_profile(fv.params(), v_z0);
      emit(rmem::verification_json(rmem::verify_profile(sol)), v_out);
    } else if (cmd_export->parsed()) {
      stage = "export";
      const auto sol = rmem::integrate_profile(fx.params(), x_z0);
      auto mesh = rmem::revolve(sol, x_ntheta, x_nsigma, x_reflect);
      if (x_ball) mesh = rmem::to_ball_model(std::move(mesh));
      rmem::write_obj(mesh, x_out);
    } else if (cmd_oracle_hemi->parsed()) {
      stage = "oracle-hemisphere";
      emit(rmem::energy_json(rmem::hemisphere_oracle(o_R, o_c0)), o_out);
    }
  } catch (const rmem::error& e) {
    std::cerr << "error in stage '" << stage << "': " << e.what() << "\n";
    return e.is_usage_error() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error in stage '" << stage << "': " << e.what() << "\n";
    return 2;
  }
  return 0;
}

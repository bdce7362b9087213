#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmm/covariance.hpp"
#include "qmm/curves.hpp"
#include "qmm/eval.hpp"
#include "qmm/formats.hpp"
#include "qmm/grid.hpp"
#include "qmm/io.hpp"
#include "qmm/lattice.hpp"
#include "qmm/matrix.hpp"
#include "qmm/rng.hpp"
#include "qmm/rotate.hpp"
#include "qmm/sic.hpp"

using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  int workers = 1;
  std::string format = "json";
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QMM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::runtime_error("QMM_SEED is not an integer");
    }
  }
  return 0;
}

// Config-file keys act as defaults: they apply only where the flag was not
// given on the command line.
void apply_config(CLI::App& app, const std::string& path) {
  if (path.empty()) return;
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  json cfg = json::parse(f);
  for (auto& [key, value] : cfg.items()) {
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (!opt) {
      for (auto* sub : app.get_subcommands({})) {
        opt = sub->get_option_no_throw("--" + key);
        if (opt) break;
      }
    }
    if (!opt || opt->count() > 0) continue;
    std::string text =
        value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

void emit(const json& report, const GlobalOpts& g) {
  std::string text = report.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(g.out);
    if (!f) throw std::runtime_error("cannot open output file " + g.out);
    f << text;
  }
}

void emit_csv(const std::string& header, const std::vector<std::string>& rows,
              const GlobalOpts& g) {
  std::ostringstream ss;
  ss << header << "\n";
  for (const auto& r : rows) ss << r << "\n";
  if (g.out.empty()) {
    std::cout << ss.str();
  } else {
    std::ofstream f(g.out);
    if (!f) throw std::runtime_error("cannot open output file " + g.out);
    f << ss.str();
  }
}

std::vector<double> parse_lambda(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  if (out.empty()) throw std::runtime_error("empty eigenvalue list");
  return out;
}

qmm::VectorQuantizer make_scheme(const std::string& scheme, bool rotate,
                                 std::size_t n, qmm::Rng& setup_rng) {
  std::vector<double> signs;
  if (rotate) {
    if (!qmm::is_power_of_two(n))
      throw std::runtime_error("rotation requires a power-of-two dimension");
    signs = qmm::random_signs(n, setup_rng);
  }
  auto wrap = [rotate, signs](auto&& inner) {
    return [rotate, signs, inner](std::span<const double> x, qmm::Rng& rng) {
      if (!rotate) return inner(x, rng);
      std::vector<double> rx = qmm::hadamard_rotate(x, signs);
      return inner(rx, rng);
    };
  };
  if (scheme == "identity") {
    return wrap([](std::span<const double> x, qmm::Rng&) {
      qmm::QuantizedVector q;
      q.codes.assign(x.begin(), x.end());
      q.scale = 1.0;
      q.format = "identity";
      q.rate_bits = 64.0;
      return q;
    });
  }
  if (scheme.rfind("int", 0) == 0) {
    int bits = std::stoi(scheme.substr(3));
    return wrap([bits](std::span<const double> x, qmm::Rng&) {
      return qmm::absmax_int_quantize(x, qmm::IntFormat{bits});
    });
  }
  if (scheme == "fp8" || scheme == "e4m3") {
    return wrap([](std::span<const double> x, qmm::Rng& rng) {
      return qmm::dithered_absmax_fp_quantize(x, qmm::e4m3(), rng);
    });
  }
  if (scheme == "fp8-absmax") {
    return wrap([](std::span<const double> x, qmm::Rng&) {
      return qmm::absmax_fp_quantize(x, qmm::e4m3());
    });
  }
  if (scheme == "nvint4" || scheme == "nvfp4") {
    qmm::NvBase base =
        scheme == "nvint4" ? qmm::NvBase::Int4 : qmm::NvBase::Fp4;
    return wrap([base](std::span<const double> x, qmm::Rng&) {
      return qmm::nv_microscale_quantize(x, base);
    });
  }
  if (scheme == "nestquant") {
    return wrap([](std::span<const double> x, qmm::Rng&) {
      qmm::NestQuantResult r = qmm::nestquant(x, 16, 16);
      qmm::QuantizedVector q;
      q.codes = std::move(r.reconstruction);
      q.scale = 1.0;
      q.format = "nestquant-e8-q16";
      q.rate_bits = r.rate_bits;
      return q;
    });
  }
  throw std::runtime_error("unknown scheme " + scheme);
}

qmm::Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double sigma,
                            qmm::Rng& rng) {
  qmm::Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = sigma * rng.next_gaussian();
  return m;
}

json resolved_config(const CLI::App& sub, const GlobalOpts& g) {
  json cfg;
  cfg["seed"] = g.seed;
  cfg["workers"] = g.workers;
  cfg["format"] = g.format;
  for (const CLI::Option* opt : sub.get_options()) {
    std::string name = opt->get_name();
    if (name.rfind("--", 0) != 0) continue;
    auto results = opt->results();
    if (results.size() == 1)
      cfg[name.substr(2)] = results.front();
    else if (!results.empty())
      cfg[name.substr(2)] = results;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized matrix multiplication benchmark harness"};
  app.require_subcommand(1);

  GlobalOpts g;
  try {
    g.seed = default_seed();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  app.add_option("--seed", g.seed, "master RNG seed (default from QMM_SEED)");
  app.add_option("--out", g.out, "output file (stdout if omitted)");
  app.add_option("--config", g.config, "JSON config file with option defaults");
  app.add_option("--workers", g.workers, "worker count for sweeps");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));

  // gen
  auto* gen = app.add_subcommand("gen", "generate a matrix artifact");
  std::size_t gen_rows = 16, gen_cols = 16;
  std::string gen_dist = "gaussian";
  double gen_sigma = 1.0, gen_spike_mag = 100.0;
  std::size_t gen_spikes = 1;
  gen->add_option("--rows", gen_rows, "row count");
  gen->add_option("--cols", gen_cols, "column count");
  gen->add_option("--dist", gen_dist, "distribution")
      ->check(CLI::IsMember({"gaussian", "uniform", "spike"}));
  gen->add_option("--sigma", gen_sigma, "gaussian standard deviation");
  gen->add_option("--spike-count", gen_spikes, "outliers per column");
  gen->add_option("--spike-mag", gen_spike_mag, "outlier magnitude");

  // ipbench
  auto* ip = app.add_subcommand("ipbench", "inner-product error benchmark");
  std::string ip_scheme = "int8";
  std::size_t ip_n = 4096, ip_a = 64, ip_b = 64;
  bool ip_rotate = false;
  ip->add_option("--scheme", ip_scheme,
                 "identity|int<M>|fp8|fp8-absmax|nvint4|nvfp4|nestquant");
  ip->add_option("--n", ip_n, "vector dimension");
  ip->add_option("--a", ip_a, "left vector count");
  ip->add_option("--b", ip_b, "right vector count");
  ip->add_flag("--rotate", ip_rotate, "apply a shared random Hadamard rotation");

  // weightquant
  auto* wq = app.add_subcommand("weightquant", "weight-only quantization");
  std::string wq_method = "watersic", wq_sigma_src = "wishart",
              wq_sigma_file, wq_dump;
  std::size_t wq_n = 64, wq_a = 256, wq_dof = 128;
  double wq_alpha = 0.0, wq_rate = 6.0;
  std::vector<double> wq_sweep;
  wq->add_option("--method", wq_method, "gptq|watersic")
      ->check(CLI::IsMember({"gptq", "watersic"}));
  wq->add_option("--n", wq_n, "weight rows");
  wq->add_option("--a", wq_a, "weight columns");
  wq->add_option("--sigma-source", wq_sigma_src, "identity|wishart|file")
      ->check(CLI::IsMember({"identity", "wishart", "file"}));
  wq->add_option("--sigma-file", wq_sigma_file, "QMX1 covariance file");
  wq->add_option("--dof", wq_dof, "Wishart degrees of freedom");
  wq->add_option("--alpha", wq_alpha, "base grid spacing (overrides --rate)");
  wq->add_option("--rate", wq_rate, "target rate in bits/entry");
  wq->add_option("--sweep", wq_sweep, "rate grid; emits one point per rate");
  wq->add_option("--dump-prefix", wq_dump, "write Z and W-hat as QMX1 files");

  // theory
  auto* th = app.add_subcommand("theory", "theoretical benchmark curves");
  std::string th_curve = "waterfill", th_lambda = "3,1";
  double th_rmin = 0.0, th_rmax = 8.0;
  std::size_t th_steps = 33, th_zn = 8;
  th->add_option("--curve", th_curve, "curve name")
      ->check(CLI::IsMember(
          {"waterfill", "diso", "drc", "gamma", "limit", "zador"}));
  th->add_option("--lambda", th_lambda, "comma-separated eigenvalues");
  th->add_option("--rmin", th_rmin, "rate grid start");
  th->add_option("--rmax", th_rmax, "rate grid end");
  th->add_option("--steps", th_steps, "rate grid size");
  th->add_option("--zn", th_zn, "max dimension for the cell bound table");

  // study
  auto* st = app.add_subcommand("study", "supporting studies");
  std::string st_name = "nsm", st_lattice = "z";
  std::size_t st_samples = 100000, st_n = 64, st_trials = 20, st_a = 64,
              st_b = 64, st_dof = 128;
  double st_lo = 0.5, st_hi = 2.0;
  bool st_rotate = false;
  st->add_option("--name", st_name, "chol-diag|delta-hist|nsm|gap")
      ->check(CLI::IsMember({"chol-diag", "delta-hist", "nsm", "gap"}));
  st->add_option("--lattice", st_lattice, "z|e8");
  st->add_option("--samples", st_samples, "Monte-Carlo samples");
  st->add_option("--n", st_n, "dimension");
  st->add_option("--trials", st_trials, "random rotations");
  st->add_option("--lo", st_lo, "spectrum lower edge");
  st->add_option("--hi", st_hi, "spectrum upper edge");
  st->add_option("--a", st_a, "left vector count");
  st->add_option("--b", st_b, "right vector count");
  st->add_option("--dof", st_dof, "Wishart degrees of freedom");
  st->add_flag("--rotate", st_rotate, "apply random rotation");

  try {
    app.parse(argc, argv);
    apply_config(app, g.config);

    qmm::Rng master(g.seed);

    if (gen->parsed()) {
      qmm::Rng rng = master.fork(1);
      qmm::Matrix m(gen_rows, gen_cols);
      if (gen_dist == "gaussian") {
        m = gaussian_matrix(gen_rows, gen_cols, gen_sigma, rng);
      } else if (gen_dist == "uniform") {
        for (std::size_t i = 0; i < gen_rows; ++i)
          for (std::size_t j = 0; j < gen_cols; ++j)
            m(i, j) = 2.0 * rng.next_double() - 1.0;
      } else {
        for (std::size_t j = 0; j < gen_cols; ++j)
          for (std::size_t s = 0; s < gen_spikes; ++s) {
            std::size_t i = rng.next_below(gen_rows);
            m(i, j) = gen_spike_mag * rng.next_sign();
          }
      }
      if (g.out.empty()) throw std::runtime_error("gen requires --out");
      if (g.format == "csv")
        qmm::write_csv(g.out, m);
      else
        qmm::write_qmx(g.out, m);
      json report = {{"config", resolved_config(*gen, g)},
                     {"rows", gen_rows},
                     {"cols", gen_cols},
                     {"path", g.out}};
      std::cout << report.dump(2) << "\n";
      return 0;
    }

    if (ip->parsed()) {
      qmm::Rng data_rng = master.fork(1);
      qmm::Rng setup_rng = master.fork(2);
      qmm::Rng quant_rng = master.fork(3);
      qmm::Matrix a = gaussian_matrix(ip_a, ip_n, 1.0, data_rng);
      qmm::Matrix b = gaussian_matrix(ip_b, ip_n, 1.0, data_rng);
      qmm::VectorQuantizer scheme =
          make_scheme(ip_scheme, ip_rotate, ip_n, setup_rng);
      qmm::MatmulErrorReport rep =
          qmm::matmul_error_report(a, b, scheme, ip_scheme, quant_rng);
      json report = {{"config", resolved_config(*ip, g)},
                     {"scheme", rep.scheme},
                     {"rotate", ip_rotate},
                     {"pairs", rep.pairs},
                     {"rms_log2_gauss", rep.rms_log2_gauss},
                     {"rms_log2_int_model", rep.rms_log2_int_model},
                     {"rms_log2_fp_model", rep.rms_log2_fp_model},
                     {"mean_delta_int", rep.mean_delta_int},
                     {"mean_delta_fp", rep.mean_delta_fp}};
      emit(report, g);
      return 0;
    }

    if (wq->parsed()) {
      qmm::Rng sigma_rng = master.fork(1);
      qmm::Rng w_rng = master.fork(2);
      qmm::Matrix sigma;
      if (wq_sigma_src == "identity") {
        sigma = qmm::Matrix::identity(wq_n);
      } else if (wq_sigma_src == "wishart") {
        sigma = qmm::wishart_covariance(wq_n, wq_dof, sigma_rng);
      } else {
        if (wq_sigma_file.empty())
          throw std::runtime_error("sigma-source=file requires --sigma-file");
        sigma = qmm::read_qmx(wq_sigma_file);
      }
      qmm::CovarianceModel model = qmm::make_covariance_model(sigma);
      qmm::Matrix w = gaussian_matrix(wq_n, wq_a, 1.0, w_rng);
      std::vector<double> rates =
          wq_sweep.empty() ? std::vector<double>{wq_rate} : wq_sweep;

      json points = json::array();
      std::vector<std::string> csv_rows;
      for (double rate : rates) {
        double alpha = wq_alpha > 0.0 ? wq_alpha : qmm::alpha_for_rate(rate);
        std::vector<double> spacings =
            wq_method == "watersic"
                ? qmm::watersic_spacings(model.chol_upper, alpha)
                : qmm::uniform_spacings(model.chol_upper, alpha);
        qmm::SicResult res =
            qmm::sic_quantize(w, model.chol_upper, spacings);
        double wmse = qmm::weighted_mse(w, res.w_hat, model.chol_upper);
        json p = {{"target_rate", rate},
                  {"alpha", alpha},
                  {"method", wq_method},
                  {"spacings_head",
                   std::vector<double>(spacings.begin(),
                                       spacings.begin() +
                                           std::min<std::size_t>(4, wq_n))},
                  {"rate_rect", qmm::rect_rate(res.indices)},
                  {"rate_entropy", qmm::entropy_rate(res.indices)},
                  {"wmse", wmse},
                  {"predicted_wmse",
                   qmm::sic_predicted_wmse(model.chol_upper, spacings)},
                  {"jitter", model.jitter}};
        points.push_back(p);
        std::ostringstream row;
        row.precision(10);
        row << rate << "," << p["rate_entropy"].get<double>() << ","
            << p["rate_rect"].get<double>() << "," << wmse;
        csv_rows.push_back(row.str());
        if (!wq_dump.empty()) {
          qmm::write_qmx(wq_dump + "_z.qmx", res.indices);
          qmm::write_qmx(wq_dump + "_what.qmx", res.w_hat);
        }
      }
      if (g.format == "csv") {
        emit_csv("target_rate,rate_entropy,rate_rect,wmse", csv_rows, g);
      } else {
        json report = {{"config", resolved_config(*wq, g)},
                       {"points", points}};
        emit(report, g);
      }
      return 0;
    }

    if (th->parsed()) {
      std::vector<double> lambda = parse_lambda(th_lambda);
      std::vector<std::string> rows;
      if (th_curve == "zador") {
        for (std::size_t n = 1; n <= th_zn; ++n) {
          std::ostringstream row;
          row.precision(10);
          row << n << "," << qmm::zador_nsm_lower_bound(n) << ","
              << qmm::zador_nsm_limit();
          rows.push_back(row.str());
        }
        emit_csv("n,bound,high_dim_limit", rows, g);
        return 0;
      }
      if (th_steps < 2) throw std::runtime_error("need at least 2 grid steps");
      for (std::size_t i = 0; i < th_steps; ++i) {
        double r = th_rmin + (th_rmax - th_rmin) * static_cast<double>(i) /
                                 static_cast<double>(th_steps - 1);
        double value;
        if (th_curve == "waterfill")
          value = qmm::waterfill(lambda, r).distortion;
        else if (th_curve == "diso")
          value = qmm::d_isotropic(lambda, r);
        else if (th_curve == "drc")
          value = r > 0.0 ? qmm::rotate_compress_at_rate(lambda, r).distortion
                          : qmm::d_isotropic(lambda, 0.0);
        else if (th_curve == "gamma")
          value = qmm::gamma_curve(r);
        else
          value = r > 0.0 ? qmm::gamma_fundamental(r)
                          : std::numeric_limits<double>::infinity();
        std::ostringstream row;
        row.precision(10);
        row << r << "," << value << "," << th_curve;
        rows.push_back(row.str());
      }
      emit_csv("rate,distortion,curve", rows, g);
      return 0;
    }

    if (st->parsed()) {
      qmm::Rng rng = master.fork(1);
      if (st_name == "nsm") {
        qmm::LatticeSpec lat = st_lattice == "e8"
                                   ? qmm::e8_lattice()
                                   : qmm::integer_lattice(st_n);
        double est = qmm::nsm_estimate(lat, st_samples, rng);
        json report = {{"config", resolved_config(*st, g)},
                       {"lattice", lat.name},
                       {"samples", st_samples},
                       {"nsm", est}};
        emit(report, g);
        return 0;
      }
      if (st_name == "chol-diag") {
        std::vector<double> lambda(st_n);
        double llo = std::log(st_lo), lhi = std::log(st_hi);
        for (std::size_t i = 0; i < st_n; ++i)
          lambda[i] = std::exp(llo + (lhi - llo) * rng.next_double());
        qmm::CholDiagStudy study =
            qmm::chol_diag_study(lambda, st_trials, rng);
        std::vector<std::string> rows;
        for (std::size_t k = 0; k < st_n; ++k) {
          std::ostringstream row;
          row.precision(10);
          row << (k + 1) << "," << study.measured_mean[k] << ","
              << study.approx[k];
          rows.push_back(row.str());
        }
        emit_csv("k,measured_mean_ukk_sq,approx", rows, g);
        return 0;
      }
      if (st_name == "delta-hist") {
        qmm::Matrix a = gaussian_matrix(st_a, st_n, 1.0, rng);
        qmm::Matrix b = gaussian_matrix(st_b, st_n, 1.0, rng);
        if (st_rotate) {
          std::vector<double> signs = qmm::random_signs(st_n, rng);
          qmm::Matrix ra(st_a, st_n), rb(st_b, st_n);
          for (std::size_t i = 0; i < st_a; ++i) {
            auto r = qmm::hadamard_rotate(a.row(i), signs);
            for (std::size_t j = 0; j < st_n; ++j) ra(i, j) = r[j];
          }
          for (std::size_t i = 0; i < st_b; ++i) {
            auto r = qmm::hadamard_rotate(b.row(i), signs);
            for (std::size_t j = 0; j < st_n; ++j) rb(i, j) = r[j];
          }
          a = ra;
          b = rb;
        }
        double sdi = 0.0, sdf = 0.0, max_df = 0.0, max_di = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < st_a; ++i)
          for (std::size_t j = 0; j < st_b; ++j) {
            double di = qmm::delta_int(a.row(i), b.row(j));
            double df = qmm::delta_fp(a.row(i), b.row(j));
            sdi += di;
            sdf += df;
            max_di = std::max(max_di, di);
            max_df = std::max(max_df, df);
            ++pairs;
          }
        json report = {{"config", resolved_config(*st, g)},
                       {"rotate", st_rotate},
                       {"pairs", pairs},
                       {"mean_delta_int", sdi / pairs},
                       {"mean_delta_fp", sdf / pairs},
                       {"max_delta_int", max_di},
                       {"max_delta_fp", max_df}};
        emit(report, g);
        return 0;
      }
      // gap
      qmm::Matrix sigma = qmm::wishart_covariance(st_n, st_dof, rng);
      qmm::CovarianceModel model = qmm::make_covariance_model(sigma);
      json report = {{"config", resolved_config(*st, g)},
                     {"n", st_n},
                     {"dof", st_dof},
                     {"rate_gap_bits",
                      qmm::uniform_vs_waterfilled_gap(model.chol_upper)}};
      emit(report, g);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

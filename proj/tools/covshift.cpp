// covshift command line front end.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covshift/distributions.hpp"
#include "covshift/experiments.hpp"
#include "covshift/functions.hpp"
#include "covshift/instance.hpp"
#include "covshift/lowerbound.hpp"
#include "covshift/parallel.hpp"
#include "covshift/regression.hpp"
#include "covshift/similarity.hpp"

using namespace covshift;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_violation = 1;
constexpr int exit_config = 2;

// thrown when a verification finds a violated invariant
struct violation : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string num(double v)
{
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Writes to the file when a path is given, otherwise to stdout.
class Output
{
public:
  explicit Output(const std::string& path)
  {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw config_error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

unsigned resolve_threads(int flag)
{
  if (flag > 0)
    return static_cast<unsigned>(flag);
  return default_thread_count();
}

// "0.1,0.2" or "geom:lo:hi:n"
std::vector<double> parse_h_list(const std::string& text)
{
  std::vector<double> hs;
  try {
    if (text.rfind("geom:", 0) == 0) {
      std::stringstream ss(text.substr(5));
      std::string lo, hi, n;
      if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') || !std::getline(ss, n))
        throw config_error("bad grid spec '" + text + "' (expected geom:lo:hi:n)");
      return similarity::geometric_grid(std::stod(lo), std::stod(hi), std::stoul(n));
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      hs.push_back(std::stod(item));
  } catch (const std::invalid_argument&) {
    throw config_error("bad h list '" + text + "'");
  } catch (const std::out_of_range&) {
    throw config_error("bad h list '" + text + "'");
  }
  if (hs.empty())
    throw config_error("empty h list");
  for (double h : hs) {
    if (!(h > 0.0))
      throw config_error("h values must be positive");
  }
  return hs;
}

struct SimilarityArgs
{
  std::string pair, h = "geom:0.001:1:200", method = "auto", out;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
};

int run_similarity(const SimilarityArgs& a)
{
  const auto pair = load_instance(a.pair);
  const auto hs = parse_h_list(a.h);
  similarity::RhoOptions opts;
  try {
    opts.method = similarity::method_from_string(a.method);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  opts.mc_samples = a.mc_samples;
  opts.seed = a.seed;
  std::vector<similarity::RhoEstimate> rows(hs.size());
  parallel_for(hs.size(), resolve_threads(a.threads), [&](std::size_t i) {
    auto o = opts;
    o.seed = derive_seed(a.seed, i);
    rows[i] = similarity::rho(pair.P, pair.Q, hs[i], o);
  });
  Output out(a.out);
  out.stream() << "h,rho,method,std_error\n";
  for (const auto& r : rows)
    out.stream() << num(r.h) << ',' << num(r.value) << ',' << similarity::to_string(r.method) << ','
                 << num(r.std_error) << '\n';
  return exit_ok;
}

struct FitArgs
{
  std::string pair, f = "linear", h = "auto", out;
  std::size_t nP = 0, nQ = 0, trials = 1, eval_points = 1000;
  double sigma = 1.0, beta = 1.0, L = 1.0;
  double alpha = 0.0; // 0: pair's declared alpha
  std::uint64_t seed = 0;
  int threads = 0;
};

int run_fit(const FitArgs& a)
{
  const auto pair = load_instance(a.pair);
  HolderParams holder{a.beta, a.L};
  try {
    holder.validate();
  } catch (const std::domain_error& e) {
    throw config_error(e.what());
  }
  if (a.nP + a.nQ == 0)
    throw config_error("need n-p + n-q > 0");
  const auto f = builtin_function(a.f, holder);
  double h = 0.0;
  if (a.h == "auto") {
    const double alpha = a.alpha > 0.0 ? a.alpha : experiments::declared_alpha(pair);
    h = regression::optimal_bandwidth(a.nP, a.nQ, a.sigma, holder, alpha);
  } else {
    try {
      h = std::stod(a.h);
    } catch (const std::exception&) {
      throw config_error("--h must be 'auto' or a number");
    }
    if (!(h > 0.0))
      throw config_error("--h must be positive");
  }
  regression::MseConfig cfg;
  cfg.trials = a.trials;
  cfg.eval_points = a.eval_points;
  cfg.seed = a.seed;
  const auto mse = regression::mse_under_q(pair, f, a.sigma, a.nP, a.nQ, h, cfg, resolve_threads(a.threads));
  const auto rho = similarity::rho(mixture_of_pair(pair, a.nP, a.nQ), pair.Q, h);
  const double rhs = regression::theorem1_rhs(h, holder, f.sup_norm, a.sigma, a.nP + a.nQ, rho.value);
  Output out(a.out);
  out.stream() << "trial,h,mse,bound_rhs\n";
  for (std::size_t t = 0; t < mse.per_trial.size(); ++t)
    out.stream() << t << ',' << num(h) << ',' << num(mse.per_trial[t]) << ',' << num(rhs) << '\n';
  return exit_ok;
}

struct RatesArgs
{
  std::string spec, out, summary, axis = "total";
  double b = 1.0;
  bool all_rows = false;
  int threads = 0;
};

int run_rates(const RatesArgs& a)
{
  const auto spec = experiments::spec_from_json(read_json_file(a.spec));
  const auto table = experiments::run_rates(spec, resolve_threads(a.threads));
  {
    Output out(a.out);
    experiments::write_csv(table, out.stream());
  }
  if (!a.summary.empty()) {
    nlohmann::json j;
    const auto axis = a.axis == "n_eff" ? experiments::Axis::n_eff : experiments::Axis::total_n;
    if (a.axis != "total" && a.axis != "n_eff")
      throw config_error("--axis must be total or n_eff");
    const auto window = a.all_rows ? experiments::Window::all : experiments::Window::upper_half;
    try {
      const auto fit = experiments::fit_slope(table, axis, a.b, window);
      j["slope"] = fit.slope;
      j["intercept"] = fit.intercept;
      j["r_squared"] = fit.r_squared;
      j["points"] = fit.points;
    } catch (const std::domain_error& e) {
      j["slope"] = nullptr;
      j["fit_error"] = e.what();
    }
    j["axis"] = a.axis;
    j["b"] = a.b;
    j["window"] = a.all_rows ? "all" : "upper_half";
    j["slope_tolerance"] = 0.12;
    j["trials"] = spec.trials;
    j["eval_points"] = spec.eval_points;
    j["seed"] = spec.base_seed;
    bool regime = true;
    for (const auto& row : table.rows)
      regime = regime && row.regime_ok;
    j["regime_ok"] = regime;
    std::ofstream s(a.summary);
    if (!s)
      throw config_error("cannot write '" + a.summary + "'");
    s << j.dump(2) << '\n';
  }
  return exit_ok;
}

struct VerifyArgs
{
  std::string pair, family = "big", out;
  double alpha = 1.0, C = 1.0, gamma = 1.0, K = 0.0;
  std::size_t grid_points = 200;
  double h_min = 1e-3;
};

int run_verify(const VerifyArgs& a)
{
  const auto pair = load_instance(a.pair);
  const auto grid = similarity::geometric_grid(a.h_min, 1.0, a.grid_points);
  nlohmann::json j;
  bool ok = false;
  if (a.family == "big" || a.family == "small") {
    FamilyDecl decl{a.family == "big" ? FamilyKind::big : FamilyKind::small, a.alpha, a.C};
    try {
      decl.validate();
    } catch (const std::domain_error& e) {
      // a family with C < 1 is empty, so nothing can be a member
      throw violation(e.what());
    }
    const auto rep = similarity::verify_family(pair, decl, grid);
    ok = rep.member;
    j = {{"family", a.family},
         {"alpha", a.alpha},
         {"C", a.C},
         {"grid_points", grid.size()},
         {"grid_ratio", rep.grid_ratio},
         {"sup_statistic", rep.sup_statistic},
         {"worst_h", rep.worst_h},
         {"member", rep.member}};
    if (decl.kind == FamilyKind::small)
      j["self_sup"] = rep.self_sup;
    if (rep.witness)
      j["witness"] = *rep.witness;
  } else if (a.family == "transfer") {
    const auto xs = similarity::geometric_grid(1e-3, 1.0, 200);
    const auto tr = similarity::transfer_exponent_holds(pair, a.gamma, a.K > 0.0 ? a.K : 1.0, grid, xs);
    const double K = a.K > 0.0 ? a.K : tr.fitted_K;
    const auto l4 = similarity::lemma4_check(pair, a.gamma, K, grid);
    ok = (a.K > 0.0 ? tr.holds : K > 0.0) && l4.holds;
    j = {{"family", "transfer"},
         {"gamma", a.gamma},
         {"K", K},
         {"fitted_K", tr.fitted_K},
         {"transfer_holds", a.K > 0.0 ? tr.holds : K > 0.0},
         {"lemma4_sup", l4.sup_statistic},
         {"lemma4_bound", l4.bound},
         {"lemma4_holds", l4.holds},
         {"worst_h", l4.worst_h}};
  } else {
    throw config_error("--family must be big, small or transfer");
  }
  Output out(a.out);
  out.stream() << j.dump(2) << '\n';
  return ok ? exit_ok : exit_violation;
}

struct LowerboundArgs
{
  double alpha = 2.0, C = 3.0, beta = 1.0, L = 1.0, sigma = 1.0;
  int M = 0; // 0: derived from the calibrated radius
  std::size_t nP = 1000, nQ = 0;
  std::string out;
};

int run_lowerbound(const LowerboundArgs& a)
{
  HolderParams holder{a.beta, a.L};
  std::optional<int> M;
  if (a.M > 0)
    M = a.M;
  lowerbound::FanoReport fano;
  lowerbound::LeCamReport lecam;
  try {
    holder.validate();
    fano = lowerbound::fano_calibration(a.alpha, a.C, holder, a.sigma, a.nP, a.nQ, M);
    lecam = lowerbound::lecam_calibration(a.alpha, holder, a.sigma, a.nP, a.nQ);
  } catch (const std::domain_error& e) {
    throw config_error(e.what());
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  Output out(a.out);
  out.stream() << "r,t,code_size,min_distance,max_kl,kl_threshold,M,r_calibrated,radius_consistent,"
                  "m_at_least_32,sample_size_ok,fano_kl_ok,lecam_kl,lecam_kl_ok\n";
  out.stream() << num(fano.r_used) << ',' << num(lecam.t) << ',' << fano.code_size << ',' << fano.min_distance << ','
               << num(fano.max_kl) << ',' << num(fano.kl_threshold) << ',' << fano.M << ','
               << num(fano.r_calibrated) << ',' << fano.radius_consistent << ',' << fano.m_at_least_32 << ','
               << fano.sample_size_ok << ',' << fano.kl_ok << ',' << num(lecam.kl) << ',' << lecam.kl_ok << '\n';
  return fano.kl_ok && lecam.kl_ok ? exit_ok : exit_violation;
}

struct GenArgs
{
  std::string kind = "hard_big", out;
  double alpha = 2.0, C = 3.0, kappa = 1.0;
  int M = 32;
};

int run_gen(const GenArgs& a)
{
  SourceTargetPair pair = [&] {
    try {
      if (a.kind == "hard_big")
        return hard_pair_big(a.alpha, a.C, a.M);
      if (a.kind == "hard_small")
        return hard_pair_small(a.alpha);
      if (a.kind == "power")
        return power_pair(a.kappa);
    } catch (const std::domain_error& e) {
      throw config_error(e.what());
    }
    throw config_error("--kind must be hard_big, hard_small or power");
  }();
  Output out(a.out);
  out.stream() << pair_to_json(pair).dump(2) << '\n';
  return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"covshift: similarity measures and nonparametric regression under covariate shift"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1, 1);

  SimilarityArgs sim;
  auto* s = app.add_subcommand("similarity", "rho_h(P,Q) over a list of bandwidths; CSV h,rho,method,std_error");
  s->add_option("--pair", sim.pair, "instance JSON")->required();
  s->add_option("--h", sim.h, "comma list or geom:lo:hi:n")->capture_default_str();
  s->add_option("--method", sim.method, "auto|quad|mc|closed")->capture_default_str();
  s->add_option("--mc-samples", sim.mc_samples)->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();
  s->add_option("--out", sim.out, "CSV path (default stdout)");
  s->add_option("--threads", sim.threads, "worker threads (default COVSHIFT_THREADS or all cores)");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Nadaraya-Watson MSE under Q; CSV trial,h,mse,bound_rhs");
  f->add_option("--pair", fit.pair, "instance JSON")->required();
  f->add_option("--f", fit.f, "builtin regression function")->capture_default_str();
  f->add_option("--n-p", fit.nP)->required();
  f->add_option("--n-q", fit.nQ)->required();
  f->add_option("--sigma", fit.sigma)->capture_default_str();
  f->add_option("--beta", fit.beta)->capture_default_str();
  f->add_option("--L", fit.L)->capture_default_str();
  f->add_option("--h", fit.h, "auto or a bandwidth")->capture_default_str();
  f->add_option("--alpha", fit.alpha, "alpha for --h auto (default: pair's declared alpha)");
  f->add_option("--trials", fit.trials)->capture_default_str();
  f->add_option("--eval-points", fit.eval_points)->capture_default_str();
  f->add_option("--seed", fit.seed)->capture_default_str();
  f->add_option("--out", fit.out, "CSV path (default stdout)");
  f->add_option("--threads", fit.threads);

  RatesArgs rates;
  auto* r = app.add_subcommand("rates", "MSE sweep; CSV n_p,n_q,h,mse_mean,mse_stderr,bound_rhs");
  r->add_option("--spec", rates.spec, "rate spec JSON")->required();
  r->add_option("--out", rates.out, "CSV path (default stdout)");
  r->add_option("--summary", rates.summary, "JSON sidecar with slope fit");
  r->add_option("--axis", rates.axis, "total|n_eff")->capture_default_str();
  r->add_option("--b", rates.b, "b for the n_eff axis")->capture_default_str();
  r->add_flag("--all-rows", rates.all_rows, "fit on every row instead of the upper half");
  r->add_option("--threads", rates.threads);

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify-family", "family membership check; exit 1 when violated");
  v->add_option("--pair", ver.pair, "instance JSON")->required();
  v->add_option("--family", ver.family, "big|small|transfer")->capture_default_str();
  v->add_option("--alpha", ver.alpha)->capture_default_str();
  v->add_option("--C", ver.C)->capture_default_str();
  v->add_option("--gamma", ver.gamma)->capture_default_str();
  v->add_option("--K", ver.K, "transfer constant (default: fitted)");
  v->add_option("--grid-points", ver.grid_points)->capture_default_str();
  v->add_option("--h-min", ver.h_min)->capture_default_str();
  v->add_option("--out", ver.out, "JSON report path (default stdout)");

  LowerboundArgs lb;
  auto* l = app.add_subcommand("lowerbound", "packing and two-point calibration checks");
  l->add_option("--alpha", lb.alpha)->capture_default_str();
  l->add_option("--C", lb.C)->capture_default_str();
  l->add_option("--M", lb.M, "packing size (default: from calibrated r)");
  l->add_option("--beta", lb.beta)->capture_default_str();
  l->add_option("--L", lb.L)->capture_default_str();
  l->add_option("--sigma", lb.sigma)->capture_default_str();
  l->add_option("--n-p", lb.nP)->capture_default_str();
  l->add_option("--n-q", lb.nQ)->capture_default_str();
  l->add_option("--out", lb.out, "CSV path (default stdout)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen-instance", "write an instance JSON");
  g->add_option("--kind", gen.kind, "hard_big|hard_small|power")->capture_default_str();
  g->add_option("--alpha", gen.alpha)->capture_default_str();
  g->add_option("--C", gen.C)->capture_default_str();
  g->add_option("--M", gen.M)->capture_default_str();
  g->add_option("--kappa", gen.kappa)->capture_default_str();
  g->add_option("--out", gen.out, "JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return exit_config;
  }

  try {
    if (*s)
      return run_similarity(sim);
    if (*f)
      return run_fit(fit);
    if (*r)
      return run_rates(rates);
    if (*v)
      return run_verify(ver);
    if (*l)
      return run_lowerbound(lb);
    if (*g)
      return run_gen(gen);
  } catch (const violation& e) {
    std::cerr << "covshift: violation: " << e.what() << '\n';
    return exit_violation;
  } catch (const config_error& e) {
    std::cerr << "covshift: " << e.what() << '\n';
    return exit_config;
  } catch (const std::domain_error& e) {
    std::cerr << "covshift: " << e.what() << '\n';
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "covshift: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "covshift: error: " << e.what() << '\n';
    return exit_config;
  }
  return exit_config;
}

// File-driven front end: JSON specs in, JSON/CSV reports out.
//
// Commands: classify, flow, koenigs, multislit, example, selftest.
// Exit codes: 0 success, 1 input error, 2 numerical inconclusiveness,
// 3 internal invariant violation.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diskflow/flow.hpp"
#include "diskflow/generator.hpp"
#include "diskflow/herglotz.hpp"
#include "diskflow/koenigs.hpp"
#include "diskflow/multislit.hpp"
#include "diskflow/specio.hpp"
#include "diskflow/unitdisc.hpp"

using namespace diskflow;
using json = specio::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitInternal = 3;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw argument_error("cannot open output file " + path);
  out << content;
}

json load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw argument_error("cannot open spec file " + path);
  json spec;
  try {
    in >> spec;
  } catch (const std::exception& e) {
    throw argument_error("malformed JSON in " + path + ": " + e.what());
  }
  return spec;
}

// "N" for a uniform grid of N angles, or an explicit comma-separated list.
std::vector<double> parse_angles(const std::string& text) {
  if (text.find(',') == std::string::npos &&
      text.find('.') == std::string::npos) {
    const int n = std::stoi(text);
    if (n <= 0 || n > 4096)
      throw argument_error("angle count must be in 1..4096");
    std::vector<double> angles(n);
    for (int k = 0; k < n; ++k) angles[k] = two_pi * k / n;
    return angles;
  }
  std::vector<double> angles;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) angles.push_back(std::stod(item));
  if (angles.empty() || angles.size() > 4096)
    throw argument_error("angle list must contain 1..4096 entries");
  return angles;
}

struct CommonOpts {
  std::string spec_path;
  std::string out_path;
  int k_min = 3;
  int k_max = 0;  // 0: module default
  double tol_pole = 1e-4;
  unsigned long seed = 885623;
};

ClassifyOptions classify_options(const CommonOpts& c) {
  ClassifyOptions opt;
  opt.k_min = c.k_min;
  if (c.k_max > 0) opt.k_max = c.k_max;
  opt.tol_pole = c.tol_pole;
  return opt;
}

int cmd_classify(const CommonOpts& c, const std::string& angles_text) {
  const auto spec = load_spec(c.spec_path);
  const Generator G = specio::parse_generator(spec);
  const auto angles = parse_angles(angles_text);
  const auto opt = classify_options(c);

  json report = json::array();
  bool any_inconclusive = false;
  for (double angle : angles) {
    const auto cls = classify_boundary(G, BoundaryPoint(angle), opt);
    json row;
    row["angle"] = angle;
    row["tag"] = to_string(cls.tag);
    switch (cls.tag) {
      case BoundaryTag::RegularPole:
        row["mass"] = cls.mass;
        row["residual"] = cls.pole_estimate.residual;
        break;
      case BoundaryTag::RegularNullPoint:
        row["dilation"] = cls.dilation;
        row["residual"] = cls.null_estimate.residual;
        break;
      case BoundaryTag::Other:
        row["residual"] = cls.value_estimate.residual;
        if (!cls.note.empty()) row["note"] = cls.note;
        break;
      case BoundaryTag::Inconclusive:
        any_inconclusive = true;
        row["residual"] = cls.value_estimate.residual;
        if (!cls.note.empty()) row["note"] = cls.note;
        break;
    }
    report.push_back(std::move(row));
  }
  write_output(c.out_path, report.dump(2) + "\n");
  return any_inconclusive ? kExitNumeric : kExitOk;
}

int cmd_flow(const CommonOpts& c, const std::string& z0_text, double t_end) {
  const auto spec = load_spec(c.spec_path);
  const Generator G = specio::parse_generator(spec);

  double re = 0.0, im = 0.0;
  if (std::sscanf(z0_text.c_str(), "%lf,%lf", &re, &im) != 2)
    throw argument_error("--z0 expects re,im");

  FlowOptions opt;
  opt.with_variational = true;
  opt.record = true;
  const Trajectory traj = flow(G, DiskPoint(re, im), t_end, opt);

  std::string csv = "t,re,im,v_re,v_im\n";
  for (const auto& s : traj.samples) {
    csv += format_double(s.t) + "," + format_double(s.z.real()) + "," +
           format_double(s.z.imag()) + "," + format_double(s.v.real()) + "," +
           format_double(s.v.imag()) + "\n";
  }
  csv += "# steps_accepted=" + std::to_string(traj.steps_accepted) +
         " steps_rejected=" + std::to_string(traj.steps_rejected) + "\n";
  write_output(c.out_path, csv);
  return kExitOk;
}

int cmd_koenigs(const CommonOpts& c, const std::string& angles_text) {
  const auto spec = load_spec(c.spec_path);
  const Generator G = specio::parse_generator(spec);
  const KoenigsMap K = koenigs(G);
  const auto angles = parse_angles(angles_text);

  // boundary data: extrapolated argument and |h| at a fixed probe radius
  const double probe_eps = std::ldexp(1.0, -12);
  std::string csv = "theta,upsilon,abs_h\n";
  for (double raw : angles) {
    // offset grid angles dodge atom angles exactly on the grid
    const double theta = wrap_angle(raw);
    const auto ups = boundary_argument(K, theta);
    const double abs_h = std::exp(K.log_abs_h(RadialPoint{theta, probe_eps}));
    csv += format_double(theta) + "," + format_double(ups.value.real()) + "," +
           format_double(abs_h) + "\n";
  }

  // defining-identity residual: h' (identity route) against differences of h
  double max_residual = 0.0;
  for (int ir = 1; ir <= 4; ++ir) {
    for (int it = 0; it < 6; ++it) {
      const double r = 0.2 * ir;
      const double a = two_pi * (it + 0.5) / 6.0;
      const Complex z = r * std::polar(1.0, a);
      const double step = 1e-6;
      const Complex fd = (K.h(z + step) - K.h(z - step)) / (2.0 * step);
      const Complex hp = K.h_prime(z);
      max_residual = std::max(
          max_residual, std::abs(hp - fd) / (1.0 + std::abs(hp)));
    }
  }
  csv += "# max_identity_residual=" + format_double(max_residual) + "\n";
  write_output(c.out_path, csv);
  return kExitOk;
}

int cmd_multislit(const CommonOpts& c, bool normalize) {
  const auto spec = load_spec(c.spec_path);
  auto slit_spec = specio::parse_slit(spec);
  json report;

  if (slit_spec.tips) {
    const auto sigma = gap_fractions_from_tips(*slit_spec.tips);
    report["sigma"] = sigma;
  }
  if (slit_spec.pole_atoms) {
    FromAtomsOptions opt;
    opt.normalize = normalize || slit_spec.normalize;
    const SlitSystem s = from_pole_atoms(*slit_spec.pole_atoms, opt);
    const auto verification = verify_slit_classification(s);
    report["a"] = s.pole_angles;
    report["mu"] = s.pole_masses;
    report["b"] = s.zero_angles;
    report["sigma"] = s.gap_fractions;
    json masses = json::array(), dilations = json::array();
    for (const auto& e : verification.poles) masses.push_back(e.measured);
    for (const auto& e : verification.nulls) dilations.push_back(e.measured);
    report["masses"] = masses;
    report["dilations"] = dilations;
    report["max_rel_error"] = verification.max_rel_error;
    report["all_ok"] = verification.all_ok;
    report["dilation_convention_note"] = verification.dilation_convention_note;
    if (!verification.all_ok) {
      write_output(c.out_path, report.dump(2) + "\n");
      return kExitNumeric;
    }
  }
  write_output(c.out_path, report.dump(2) + "\n");
  return kExitOk;
}

struct CheckList {
  std::string text;
  bool all_ok = true;

  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    text += std::string(ok ? "PASS" : "FAIL") + " " + name;
    if (!detail.empty()) text += " (" + detail + ")";
    text += "\n";
    all_ok = all_ok && ok;
  }
};

int example_step_measure(const CommonOpts& c) {
  CheckList out;
  auto mu = HerglotzMeasure::step({{std::numbers::pi, two_pi, 2.0}});
  const BoundaryPoint tip(std::numbers::pi / 2.0);

  const auto crit = pole_criterion(mu, tip);
  out.check("pole criterion at pi/2", crit.is_pole);
  out.check("sine term vanishes",
            std::abs(crit.sine_term.value) <= 1e-4,
            "|sine| = " + format_double(std::abs(crit.sine_term.value)));

  auto G = Generator::from_measure(DiskPoint(0.0, 0.0), mu);
  const auto cls = classify_boundary(G, tip, classify_options(c));
  out.check("generator classifier agrees",
            cls.tag == BoundaryTag::RegularPole,
            "mass = " + format_double(cls.mass));

  const auto off = pole_criterion(mu, BoundaryPoint(std::numbers::pi / 3.0));
  out.check("no pole inside the flat arc", !off.is_pole);

  write_output(c.out_path, out.text);
  return out.all_ok ? kExitOk : kExitNumeric;
}

int example_cusp(const CommonOpts& c, const std::vector<double>& alphas) {
  CheckList out;
  for (double alpha : alphas) {
    auto mu = HerglotzMeasure::power_cusp(CuspProfile::standard(alpha));
    const auto crit = pole_criterion(mu, BoundaryPoint(std::numbers::pi));
    const bool expect_pole = alpha > 2.0;
    out.check("alpha = " + format_double(alpha) +
                  (expect_pole ? ": pole" : ": no pole"),
              crit.is_pole == expect_pole);
  }
  write_output(c.out_path, out.text);
  return out.all_ok ? kExitOk : kExitNumeric;
}

int example_no_tip_cmd(const CommonOpts& c, const std::string& rule,
                       std::vector<int> m_values) {
  CheckList out;
  if (m_values.empty()) m_values = {8, 16, 32, 64};
  auto study = example_no_tip(theta_rule(rule), m_values, {1e-4, 1e-6});

  for (const auto& st : study.steps) {
    out.text += "m=" + std::to_string(st.m) +
                " fatou_sum=" + format_double(st.fatou_open_sum) +
                " pole_mass_at_1=" + format_double(st.pole_mass_at_one) + "\n";
  }
  if (rule == "harmonic" && study.steps.size() >= 2) {
    out.check("fatou sums diverge",
              study.steps.back().fatou_open_sum >
                  study.steps.front().fatou_open_sum + 0.5);
    bool monotone = true;
    for (std::size_t i = 1; i < study.steps.size(); ++i)
      monotone = monotone && study.steps[i].pole_mass_at_one <
                                 study.steps[i - 1].pole_mass_at_one;
    out.check("pole mass at the accumulation point decays", monotone);
  }
  write_output(c.out_path, out.text);
  return out.all_ok ? kExitOk : kExitNumeric;
}

int example_koebe_suite(const CommonOpts& c) {
  CheckList out;
  auto G = Generator(DiskPoint(0.0, 0.0),
                     std::make_shared<AtomSumP>(
                         std::vector<HerglotzMeasure::Atom>{{std::numbers::pi, 1.0}}),
                     "koebe");

  const auto pole = classify_boundary(G, BoundaryPoint(std::numbers::pi));
  out.check("pole at -1 with mass 2",
            pole.tag == BoundaryTag::RegularPole &&
                std::abs(pole.mass - 2.0) <= 1e-5,
            "mass = " + format_double(pole.mass));

  const auto null = classify_boundary(G, BoundaryPoint(0.0));
  out.check("null point at 1 with dilation 1/2",
            null.tag == BoundaryTag::RegularNullPoint &&
                std::abs(null.dilation - 0.5) <= 1e-6,
            "dilation = " + format_double(null.dilation));

  const auto K = koenigs(G);
  out.check("h(1/2) = 2",
            std::abs(K.h(Complex(0.5, 0.0)) - Complex(2.0, 0.0)) <= 1e-9);

  const auto hb = h_beta_point(K, BoundaryPoint(std::numbers::pi));
  out.check("h'' -> 1/8 at -1",
            hb.is_beta_point &&
                std::abs(hb.second_derivative - Complex(0.125, 0.0)) <= 1e-5);

  out.check("beta number at -1 is 1",
            std::abs(beta_number(K, BoundaryPoint(std::numbers::pi)) - 1.0) <=
                1e-4);

  const auto dil =
      dilatation_coefficient(semigroup_map(G, 1.0), BoundaryPoint(0.0));
  out.check("dilatation of phi_1 at 1 is e^{1/2}",
            dil.converged &&
                std::abs(dil.value.real() - std::exp(0.5)) <= 1e-4,
            "value = " + format_double(dil.value.real()));

  write_output(c.out_path, out.text);
  return out.all_ok ? kExitOk : kExitNumeric;
}

int cmd_selftest(const CommonOpts& c) {
  CheckList out;

  auto koebe = Generator(
      DiskPoint(0.0, 0.0),
      std::make_shared<AtomSumP>(
          std::vector<HerglotzMeasure::Atom>{{std::numbers::pi, 1.0}}),
      "koebe");
  const auto pole = classify_boundary(koebe, BoundaryPoint(std::numbers::pi));
  out.check("koebe pole mass", std::abs(pole.mass - 2.0) < 1e-5);

  const auto K = koenigs(koebe);
  out.check("koebe koenigs value",
            std::abs(K.h(Complex(0.5, 0.0)) - Complex(2.0, 0.0)) < 1e-9);

  auto half = Generator(BoundaryPoint(0.0),
                        std::make_shared<ConstantP>(Complex(1.0, 0.0)));
  out.check("half-plane flow",
            std::abs(flow_point(half, Complex(0.0, 0.0), 1.0) -
                     Complex(0.5, 0.0)) < 1e-9);

  auto s = from_pole_atoms({{0.0, 0.5}, {std::numbers::pi, 0.5}});
  out.check("two-slit verification", verify_slit_classification(s).all_ok);

  write_output(c.out_path, out.text);
  return out.all_ok ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unit-disk semigroup toolkit: generators, flows, Koenigs maps"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string angles_text = "16";
  std::string z0_text = "0,0";
  double t_end = 1.0;
  bool normalize = false;
  std::string example_name;
  std::vector<double> alphas{1.0, 1.5, 2.5, 3.0};
  std::string rule = "harmonic";
  std::vector<int> m_values;

  auto add_common = [&](CLI::App* cmd, bool needs_spec) {
    if (needs_spec)
      cmd->add_option("--spec", common.spec_path, "input spec (JSON)")
          ->required();
    cmd->add_option("--out", common.out_path, "output path (default stdout)");
    cmd->add_option("--eps-kmin", common.k_min, "radial grid start exponent");
    cmd->add_option("--eps-kmax", common.k_max, "radial grid end exponent");
    cmd->add_option("--tol-pole", common.tol_pole, "pole mass threshold");
    cmd->add_option("--seed", common.seed, "seed for randomized suites");
  };

  auto* classify = app.add_subcommand("classify", "classify boundary points");
  add_common(classify, true);
  classify->add_option("--angles", angles_text, "count N or list a,b,c");

  auto* flow_cmd = app.add_subcommand("flow", "integrate a trajectory (CSV)");
  add_common(flow_cmd, true);
  flow_cmd->add_option("--z0", z0_text, "start point re,im")->required();
  flow_cmd->add_option("--t", t_end, "end time")->required();

  auto* koenigs_cmd =
      app.add_subcommand("koenigs", "boundary data of the Koenigs image (CSV)");
  add_common(koenigs_cmd, true);
  koenigs_cmd->add_option("--angles", angles_text, "count N or list a,b,c");

  auto* multislit_cmd =
      app.add_subcommand("multislit", "slit system report (JSON)");
  add_common(multislit_cmd, true);
  multislit_cmd->add_flag("--normalize", normalize, "rescale pole masses to sum 1");

  auto* example_cmd = app.add_subcommand("example", "named scenario runs");
  example_cmd->add_option("name", example_name, "scenario name")->required();
  add_common(example_cmd, false);
  example_cmd->add_option("--alpha", alphas, "cusp exponents");
  example_cmd->add_option("--rule", rule, "theta rule (harmonic|geometric)");
  example_cmd->add_option("--m-values", m_values, "truncation orders");

  auto* selftest_cmd = app.add_subcommand("selftest", "condensed oracle checks");
  add_common(selftest_cmd, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return cmd_classify(common, angles_text);
    if (flow_cmd->parsed()) return cmd_flow(common, z0_text, t_end);
    if (koenigs_cmd->parsed()) return cmd_koenigs(common, angles_text);
    if (multislit_cmd->parsed()) return cmd_multislit(common, normalize);
    if (example_cmd->parsed()) {
      if (example_name == "step_measure") return example_step_measure(common);
      if (example_name == "cusp") return example_cusp(common, alphas);
      if (example_name == "no_tip")
        return example_no_tip_cmd(common, rule, m_values);
      if (example_name == "koebe_suite") return example_koebe_suite(common);
      std::cerr << "unknown example '" << example_name
                << "'; valid names: step_measure, cusp, no_tip, koebe_suite\n";
      return kExitInput;
    }
    if (selftest_cmd->parsed()) return cmd_selftest(common);
  } catch (const argument_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const internal_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

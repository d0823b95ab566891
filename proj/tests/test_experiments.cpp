#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "frontload/frontload.hpp"

using namespace frontload;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("frontload_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig config_for(Scenario s, const ParameterMap& overrides, const fs::path& out) {
  auto c = make_config(s, overrides);
  c.output_dir = out;
  return c;
}

const Assertion* find(const RunManifest& m, const std::string& name) {
  for (const auto& a : m.assertions)
    if (a.name == name) return &a;
  return nullptr;
}

// Every numeric cell re-serializes to the same text at `digits`.
void expect_lossless(const fs::path& file, int digits) {
  std::ifstream in(file);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  auto ctx = make_context(std::max(digits, 15), 10);
  ScopedPrecision scope(ctx);
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      if (digits > 17) {
        EXPECT_EQ(to_decimal(parse_real<HighReal>(cell), digits), cell) << file;
      } else {
        EXPECT_EQ(to_decimal(parse_real<double>(cell), digits), cell) << file;
      }
    }
    ++rows;
  }
  EXPECT_GT(rows, 0);
}

}  // namespace

TEST(Fnv1a, ReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(fnv1a64("x,re,im,abs2\n")), "0x2fccc6e8e4a44c72");
  EXPECT_EQ(hex64(1), "0x0000000000000001");
}

TEST(KeyValues, ParsesCommentsAndWhitespace) {
  std::stringstream ss("# header\n\n  K = 20 \nsigma=1.5\r\n");
  auto kv = parse_key_values(ss);
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv["K"], "20");
  EXPECT_EQ(kv["sigma"], "1.5");
}

TEST(KeyValues, RejectsMalformedLines) {
  std::stringstream a("K 20\n");
  EXPECT_THROW(parse_key_values(a), DomainError);
  std::stringstream b("K=1\nK=2\n");
  EXPECT_THROW(parse_key_values(b), DomainError);
  std::stringstream c("=3\n");
  EXPECT_THROW(parse_key_values(c), DomainError);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(make_config(Scenario::fig3, {{"Kay", "20"}}), DomainError);
  EXPECT_THROW(make_config(Scenario::fig4, {{"channel", "spin"}}), DomainError);
  EXPECT_THROW(make_config(Scenario::fig4, {{"scenario", "fig3"}}), DomainError);
  EXPECT_NO_THROW(make_config(Scenario::fig4, {{"scenario", "fig4"}, {"p0", "40"}}));
}

TEST(Config, EveryScenarioHasParseableDefaults) {
  for (Scenario s : {Scenario::fig3, Scenario::fig4, Scenario::cut_pulse, Scenario::encode_demo, Scenario::hartman,
                     Scenario::window_scan}) {
    for (bool paper : {false, true}) {
      auto c = make_config(s, {}, paper);
      EXPECT_FALSE(c.parameters.empty());
      for (const auto& [k, v] : c.parameters) {
        if (k == "channel") continue;
        if (k == "widths") {
          EXPECT_FALSE(c.list(k).empty());
          continue;
        }
        EXPECT_NO_THROW(c.real(k)) << scenario_name(s) << " " << k;
      }
    }
  }
}

TEST(Config, CaptionParameters) {
  auto f3 = make_config(Scenario::fig3, {}, true);
  EXPECT_EQ(f3.integer("K"), 150);
  EXPECT_EQ(f3.integer("n"), 6);
  EXPECT_EQ(f3.real("sigma"), 1.5);
  auto f4 = make_config(Scenario::fig4, {}, true);
  EXPECT_EQ(f4.real("p0") * f4.real("d"), 3000);
  EXPECT_EQ(f4.real("V_ratio"), 2);
  EXPECT_EQ(f4.real("t"), 1.5);
  EXPECT_EQ(f4.real("sigma"), 0.135);
  auto scaled = make_config(Scenario::fig3, {});
  EXPECT_EQ(scaled.integer("K"), 20);
  EXPECT_EQ(scaled.integer("n"), 2);
}

TEST(Config, NumberParsing) {
  auto c = make_config(Scenario::fig4, {{"p0", "3e1"}, {"sigma", "2x"}});
  EXPECT_EQ(c.real("p0"), 30);
  EXPECT_THROW(c.real("sigma"), DomainError);
  EXPECT_THROW(c.integer("p0"), DomainError);
  EXPECT_THROW(c.get("nothing"), DomainError);
}

TEST(Config, ScenarioNames) {
  EXPECT_EQ(parse_scenario("cut"), Scenario::cut_pulse);
  EXPECT_EQ(parse_scenario("encode_demo"), Scenario::encode_demo);
  EXPECT_THROW(parse_scenario("fig5"), DomainError);
}

TEST(Manifest, RoundTrip) {
  RunManifest m;
  m.scenario = "fig4";
  m.parameters = {{"p0", "30"}, {"sigma", "2"}};
  m.digits = 15;
  m.files = {{"a.csv", hex64(7)}};
  m.check("two_humps", true, "peaks=2");
  m.check("analytic_matches", false);
  m.note("x_unit", "d");
  m.wall_seconds = 1.5;
  std::stringstream ss;
  write_manifest(ss, m);
  EXPECT_NE(ss.str().find("status=FAIL"), std::string::npos);
  auto r = read_manifest(ss);
  EXPECT_EQ(r.scenario, "fig4");
  EXPECT_EQ(r.parameters, m.parameters);
  EXPECT_EQ(r.digits, 15);
  ASSERT_EQ(r.files.size(), 1u);
  EXPECT_EQ(r.files[0].checksum, "0x0000000000000007");
  ASSERT_EQ(r.assertions.size(), 2u);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(find(r, "two_humps")->detail, "peaks=2");
  EXPECT_DOUBLE_EQ(r.wall_seconds, 1.5);
}

TEST(Manifest, UnknownKeyRejected) {
  std::stringstream ss("scenario=fig3\nbogus=1\n");
  EXPECT_THROW(read_manifest(ss), DomainError);
}

TEST(PlotScript, EmptyManifestRejected) {
  RunManifest m;
  m.scenario = "fig4";
  EXPECT_THROW(emit_plot_script(m, scratch("plot_empty")), DomainError);
}

TEST(PlotScript, MissingCsvRejected) {
  auto dir = scratch("plot_missing");
  RunManifest m;
  m.scenario = "fig4";
  emit_file(m, dir, "fig4_plot.csv", "x\n");
  m.files.push_back({"fig4_momentum_plot.csv", hex64(0)});
  EXPECT_THROW(emit_plot_script(m, dir), DomainError);
}

TEST(Decoder, TailScoresMatchBruteForce) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  using C = Complex<double>;
  std::vector<C> y(40), a(40), b(40);
  for (std::size_t i = 0; i < 40; ++i) {
    y[i] = C(g(rng), g(rng));
    a[i] = C(g(rng), g(rng));
    b[i] = C(g(rng), g(rng));
  }
  auto s = tail_scores(y, a, b, 0.25, 0.1);
  for (std::size_t i = 0; i < 40; i += 7) {
    double sep = 0, m0 = 0, m1 = 0;
    for (std::size_t k = i; k < 40; ++k) {
      sep += std::norm(b[k] - a[k]) * 0.25 / 0.2;
      m0 += std::norm(y[k] - a[k]) * 0.25 / 0.2;
      m1 += std::norm(y[k] - b[k]) * 0.25 / 0.2;
    }
    EXPECT_NEAR(s[i].separation, sep, 1e-12 * sep);
    EXPECT_NEAR(s[i].misfit_zero, m0, 1e-12 * m0);
    EXPECT_NEAR(s[i].misfit_one, m1, 1e-12 * m1);
  }
}

TEST(Decoder, IdenticalTemplatesNeverSeparate) {
  using C = Complex<double>;
  std::vector<C> s(100);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = C(std::exp(-0.01 * double(i * i)), 0);
  auto scores = tail_scores(s, s, s, 0.1, 1e-6);
  for (const auto& sc : scores) {
    EXPECT_EQ(sc.separation, 0.0);
    EXPECT_FALSE(separable(sc, 1000));
    EXPECT_EQ(sc.log_ratio(), 0.0);
    EXPECT_EQ(decide(sc, 1000), Decision::undecided);
  }
}

TEST(Decoder, Decisions) {
  TailScore<double> one{20, 10, 0};
  TailScore<double> zero{20, 0, 10};
  TailScore<double> neither{20, 50, 40};
  TailScore<double> close{1, 0.5, 0.2};
  EXPECT_EQ(decide(one, 1000), Decision::one);
  EXPECT_EQ(decide(zero, 1000), Decision::zero);
  EXPECT_EQ(decide(neither, 1000), Decision::reject);
  EXPECT_EQ(decide(close, 1000), Decision::undecided);
  EXPECT_THROW(decide(one, 1.0), DomainError);
  EXPECT_THROW(tail_scores<double>({}, {}, {1}, 1.0, 1.0), DomainError);
}

TEST(Fig3, DefaultRunPasses) {
  auto dir = scratch("fig3");
  auto m = run_scenario(config_for(Scenario::fig3, {}, dir));
  for (const auto& a : m.assertions) EXPECT_TRUE(a.pass) << a.name << " " << a.detail;
  EXPECT_TRUE(fs::exists(dir / "manifest.txt"));
  EXPECT_TRUE(fs::exists(dir / "fig3.gp"));
  auto script = slurp(dir / "fig3.gp");
  EXPECT_NE(script.find("multiplot layout 2,1"), std::string::npos);
  EXPECT_EQ(script.find(dir.string()), std::string::npos);
  expect_lossless(dir / "fig3_transmitted.csv", m.digits);
  expect_lossless(dir / "fig3_window.csv", m.digits);
  std::ifstream mf(dir / "manifest.txt");
  auto back = read_manifest(mf);
  EXPECT_TRUE(back.passed());
  for (const auto& f : back.files) EXPECT_EQ(hex64(fnv1a64(slurp(dir / f.name))), f.checksum) << f.name;
}

TEST(Fig3, Deterministic) {
  auto a = run_scenario(config_for(Scenario::fig3, {{"grid_points", "512"}}, scratch("fig3_a")));
  auto b = run_scenario(config_for(Scenario::fig3, {{"grid_points", "512"}}, scratch("fig3_b")));
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    EXPECT_EQ(a.files[i].name, b.files[i].name);
    EXPECT_EQ(a.files[i].checksum, b.files[i].checksum) << a.files[i].name;
  }
}

TEST(Fig3, AdvanceBeyondWindowFails) {
  auto m = run_scenario(config_for(Scenario::fig3, {{"n", "6"}, {"grid_points", "1024"}}, scratch("fig3_probe")));
  const Assertion* a = find(m, "two_advanced_humps");
  ASSERT_NE(a, nullptr);
  EXPECT_FALSE(a->pass);
  EXPECT_FALSE(m.passed());
}

TEST(Fig3, PrecisionShortfall) {
  auto c = config_for(Scenario::fig3, {}, scratch("fig3_short"));
  c.digits = 20;
  EXPECT_THROW(run_scenario(c), DomainError);
}

TEST(Fig4, ScaledRunReportsAssertions) {
  auto dir = scratch("fig4");
  auto m = run_scenario(config_for(Scenario::fig4, {}, dir));
  ASSERT_NE(find(m, "two_humps"), nullptr);
  EXPECT_TRUE(find(m, "two_humps")->pass);
  EXPECT_TRUE(find(m, "advancement_per_d")->pass) << find(m, "advancement_per_d")->detail;
  ASSERT_NE(find(m, "analytic_matches"), nullptr);
  EXPECT_NE(find(m, "analytic_matches")->detail.find("relative_linf="), std::string::npos);
  auto script = slurp(dir / "fig4.gp");
  for (const char* label : {"tunnelled pulse", "free motion", "incident pulse at t=0", "quadratic approximation",
                            "transmission amplitude", "momentum distribution of the initial pulse"}) {
    EXPECT_NE(script.find(label), std::string::npos) << label;
  }
  expect_lossless(dir / "fig4_transmitted.csv", 17);
  expect_lossless(dir / "fig4_transmission.csv", 17);
  expect_lossless(dir / "fig4_spectrum.csv", 17);
}

TEST(Fig4, AboveBarrierCarrierRejected) {
  EXPECT_THROW(run_scenario(config_for(Scenario::fig4, {{"V_ratio", "0.5"}}, scratch("fig4_above"))), DomainError);
}

TEST(Cut, SpinChannelPasses) {
  auto m = run_scenario(config_for(Scenario::cut_pulse, {}, scratch("cut_spin")));
  for (const auto& a : m.assertions) EXPECT_TRUE(a.pass) << a.name << " " << a.detail;
}

TEST(Cut, BarrierChannelPasses) {
  auto m = run_scenario(config_for(
      Scenario::cut_pulse, {{"channel", "barrier"}, {"sigma", "1"}, {"grid_points", "801"}}, scratch("cut_bar")));
  for (const auto& a : m.assertions) EXPECT_TRUE(a.pass) << a.name << " " << a.detail;
}

TEST(Cut, UnknownChannel) {
  EXPECT_THROW(run_scenario(config_for(Scenario::cut_pulse, {{"channel", "fibre"}}, scratch("cut_bad"))),
               DomainError);
}

TEST(Encode, DefaultRunPasses) {
  auto dir = scratch("encode");
  auto m = run_scenario(config_for(Scenario::encode_demo, {}, dir));
  for (const auto& a : m.assertions) EXPECT_TRUE(a.pass) << a.name << " " << a.detail;
  EXPECT_NE(slurp(dir / "manifest.txt").find("note.likelihood_threshold=1000"), std::string::npos);
}

TEST(Hartman, DefaultRunPasses) {
  auto dir = scratch("hartman");
  auto m = run_scenario(config_for(Scenario::hartman, {}, dir));
  for (const auto& a : m.assertions) EXPECT_TRUE(a.pass) << a.name << " " << a.detail;
  std::ifstream in(dir / "hartman.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "d,sigma,advancement,abs_T0,log10_abs_T0,approx_error,included,note");
}

TEST(Window, DefaultRunPasses) {
  auto dir = scratch("window");
  auto m = run_scenario(config_for(Scenario::window_scan, {}, dir));
  for (const auto& a : m.assertions) EXPECT_TRUE(a.pass) << a.name << " " << a.detail;
  std::ifstream in(dir / "window.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "p,absT,local_frequency");
}

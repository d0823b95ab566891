#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/experiments/manifest.hpp"

namespace frontload {

namespace detail {

inline void require_csv(const RunManifest& m, const std::filesystem::path& dir, const std::string& name) {
  if (!m.file(name)) throw DomainError("manifest does not list " + name);
  if (!std::filesystem::exists(dir / name)) throw DomainError("missing CSV " + (dir / name).string());
}

inline void preamble(std::ostringstream& os, const std::string& png, const char* size = "900,600") {
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set terminal pngcairo size " << size << "\n"
     << "set output '" << png << "'\n";
}

}  // namespace detail

/// gnuplot script rendering the scenario's figure from the CSVs listed in
/// the manifest. CSV paths are relative to `dir`, where the script lives.
inline std::string emit_plot_script(const RunManifest& m, const std::filesystem::path& dir) {
  if (m.files.empty()) throw DomainError("manifest lists no CSV files");
  std::ostringstream os;
  auto use = [&](const std::string& name) {
    detail::require_csv(m, dir, name);
    return "'" + name + "'";
  };
  if (m.scenario == "fig3") {
    auto pulses = use("fig3_plot.csv");
    auto window = use("fig3_window_plot.csv");
    detail::preamble(os, "fig3.png", "900,900");
    os << "set multiplot layout 2,1\n"
       << "set xlabel 'x/d'\nset ylabel '|psi|^2'\n"
       << "set yrange [0:*]\n"
       << "plot " << pulses << " using 1:3 with lines dt 2 title 'free motion', \\\n"
       << "     " << pulses << " using 1:2 with lines lw 2 title 'transmitted (x 1/|C|^2)', \\\n"
       << "     " << pulses << " using 1:4 with points pt 6 title 'free motion, rear amputated', \\\n"
       << "     " << pulses << " using 1:5 with lines dt 3 title 'transmitted, rear amputated (x 1/|C|^2)'\n"
       << "set autoscale y\n"
       << "set xlabel 'p d'\nset ylabel 'log10 |T|'\nset y2label 'local frequency / d'\n"
       << "set ytics nomirror\nset y2tics\n"
       << "plot " << window << " using 1:2 with lines title 'log10 |T(p)|', \\\n"
       << "     " << window << " using 1:3 axes x1y2 with lines title 'local frequency'\n"
       << "unset multiplot\n";
  } else if (m.scenario == "fig4") {
    auto pulses = use("fig4_plot.csv");
    auto momentum = use("fig4_momentum_plot.csv");
    detail::preamble(os, "fig4.png", "900,900");
    os << "set multiplot layout 2,1\n"
       << "set xlabel 'x/d'\nset ylabel '|psi|^2'\n"
       << "plot " << pulses << " using 1:2 with lines lw 2 title 'tunnelled pulse (x 1/|T(p_0)|^2)', \\\n"
       << "     " << pulses << " using 1:3 with lines dt 2 title 'free motion', \\\n"
       << "     " << pulses << " using 1:5 with lines dt 4 title 'incident pulse at t=0', \\\n"
       << "     " << pulses << " using 1:4 with points pt 7 ps 0.3 title 'quadratic approximation'\n"
       << "set xlabel 'p d'\nset ylabel 'scaled'\nset logscale y\n"
       << "plot " << momentum << " using 1:2 with lines title 'transmission amplitude |T(p)/T(p_0)|', \\\n"
       << "     " << momentum << " using 1:3 with lines title 'momentum distribution of the initial pulse'\n"
       << "unset logscale y\nunset multiplot\n";
  } else if (m.scenario == "cut") {
    auto pulses = use("cut_plot.csv");
    detail::preamble(os, "cut.png");
    os << "set xlabel 'x/d'\nset ylabel '|psi|^2'\nset logscale y\nset yrange [1e-12:*]\n"
       << "plot " << pulses << " using 1:2 with lines dt 2 title 'rear-amputated input', \\\n"
       << "     " << pulses << " using 1:3 with lines lw 2 title 'transmitted, uncut', \\\n"
       << "     " << pulses << " using 1:4 with lines dt 3 title 'transmitted, rear amputated'\n";
  } else if (m.scenario == "encode") {
    auto scores = use("encode_scores.csv");
    std::string threshold = "1000";
    for (const auto& [k, v] : m.notes)
      if (k == "likelihood_threshold") threshold = v;
    detail::preamble(os, "encode.png");
    os << "set xlabel 't'\nset ylabel 'log likelihood ratio'\nset logscale y\n"
       << "plot " << scores << " using 1:2 with lines title 'through the device', \\\n"
       << "     " << scores << " using 1:3 with lines dt 2 title 'free propagation', \\\n"
       << "     log(" << threshold << ") with lines dt 4 title 'threshold'\n";
  } else if (m.scenario == "hartman") {
    auto rows = use("hartman.csv");
    detail::preamble(os, "hartman.png", "900,900");
    os << "set multiplot layout 2,1\n"
       << "set xlabel 'd'\nset ylabel 'log10 |T(p_0)|'\n"
       << "plot " << rows << " using 1:5 with linespoints title 'log10 |T(p_0)|'\n"
       << "set ylabel 'advancement / d'\nset yrange [0.9:1.1]\n"
       << "plot " << rows << " using 1:($3/$1) with linespoints title 'advancement / d'\n"
       << "unset multiplot\n";
  } else if (m.scenario == "window") {
    auto window = use("window_plot.csv");
    auto cost = use("window_cost.csv");
    detail::preamble(os, "window.png", "900,900");
    os << "set multiplot layout 2,1\n"
       << "set xlabel 'p d'\nset ylabel 'log10 |T|'\nset y2label 'local frequency / d'\n"
       << "set ytics nomirror\nset y2tics\n"
       << "plot " << window << " using 1:2 with lines title 'log10 |T(p)|', \\\n"
       << "     " << window << " using 1:3 axes x1y2 with lines title 'local frequency'\n"
       << "unset y2tics\nunset y2label\nset ytics mirror\n"
       << "set xlabel 'n'\nset ylabel 'log10 |C|'\n"
       << "plot " << cost << " using 1:2 with linespoints title 'amplitude cost'\n"
       << "unset multiplot\n";
  } else {
    throw DomainError("no plot layout for scenario '" + m.scenario + "'");
  }
  return os.str();
}

}  // namespace frontload

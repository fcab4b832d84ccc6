#include "deepesn/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace deepesn {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string joined(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ';';
    s += format_double(values[i]);
  }
  return s;
}

// Commas and newlines would break the row structure.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write to " + path.string() + " failed");
}

}  // namespace

std::string results_csv_header() {
  return "task,model,layers,units,input_scale,leak_rate,spectral_radius,lambda,base_seed,guesses,"
         "mean_validation_nrmse,std_validation_nrmse,mean_test_nrmse,std_test_nrmse,"
         "validation_nrmse_per_guess,test_nrmse_per_guess,error\n";
}

std::string results_csv_rows(std::string_view task, std::string_view model,
                             std::span<const ConfigRecord> records) {
  std::ostringstream os;
  for (const auto& r : records) {
    const auto& p = r.params;
    os << task << ',' << model << ',' << p.num_layers << ',' << p.units_per_layer << ','
       << format_double(p.input_scale) << ',' << format_double(p.leak_rate) << ','
       << format_double(p.spectral_radius) << ',' << format_double(r.scores.lambda) << ',' << p.seed
       << ',' << r.scores.validation.size() << ',' << format_double(r.scores.mean_validation) << ','
       << format_double(r.scores.std_validation) << ',' << format_double(r.scores.mean_test) << ','
       << format_double(r.scores.std_test) << ',' << joined(r.scores.validation) << ','
       << joined(r.scores.test) << ',' << sanitize(r.error) << '\n';
  }
  return os.str();
}

std::string summary_text(const ExperimentResult& result, std::string_view model) {
  std::ostringstream os;
  const auto& g = result.grid;
  os << "task: " << result.task << '\n'
     << "model: " << model << " (" << g.num_layers << " x " << g.units_per_layer << " units)\n"
     << "guesses: " << g.guesses << ", base seed: " << g.base_seed << '\n'
     << "grid: " << g.input_scales.size() << " input scales x " << g.leak_rates.size()
     << " leak rates x " << g.spectral_radii.size() << " spectral radii x " << g.lambdas.size()
     << " lambdas\n"
     << "failed configs: " << result.failed_configs << '\n';
  if (const auto* best = result.best()) {
    const auto& p = best->params;
    os << "selected: input_scale=" << format_double(p.input_scale)
       << " leak_rate=" << format_double(p.leak_rate)
       << " spectral_radius=" << format_double(p.spectral_radius)
       << " lambda=" << format_double(best->scores.lambda) << '\n'
       << "validation NRMSE: " << format_double(best->scores.mean_validation) << " +- "
       << format_double(best->scores.std_validation) << '\n'
       << "test NRMSE: " << format_double(best->scores.mean_test) << " +- "
       << format_double(best->scores.std_test) << '\n';
  } else {
    os << "selected: none (no successful configuration)\n";
  }
  return os.str();
}

std::string comparison_table(std::span<const NrmseRow> rows) {
  // Keep first-seen task order.
  std::vector<std::string> tasks;
  std::map<std::string, std::map<std::string, double>> cells;
  for (const auto& r : rows) {
    if (!cells.count(r.task)) tasks.push_back(r.task);
    cells[r.task][r.model] = r.mean;
  }
  char line[128];
  std::ostringstream os;
  std::snprintf(line, sizeof line, "%-8s | %-12s | %-12s\n", "Task", "L-deepESN", "L-ESN");
  os << line << "---------+--------------+-------------\n";
  for (const auto& t : tasks) {
    auto cell = [&](const char* model) -> std::string {
      auto it = cells[t].find(model);
      if (it == cells[t].end()) return "-";
      char b[32];
      std::snprintf(b, sizeof b, "%.2e", it->second);
      return b;
    };
    std::string name = t;
    if (name.rfind("mso", 0) == 0) name = "MSO" + name.substr(3);
    std::snprintf(line, sizeof line, "%-8s | %-12s | %-12s\n", name.c_str(), cell("deep").c_str(),
                  cell("shallow").c_str());
    os << line;
  }
  return os.str();
}

std::string spike_table(const SpikeMetrics& m) {
  std::ostringstream os;
  os << "layer,filtering_ratio,detected";
  for (std::size_t i = 0; i < m.phis.size(); ++i) os << ",spike_" << (i + 1);
  os << '\n';
  for (std::size_t l = 0; l < m.magnitude.size(); ++l) {
    os << (l + 1) << ',' << format_double(m.filtering_ratio[l]) << ','
       << m.detected_count(static_cast<int>(l));
    for (double v : m.magnitude[l]) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

std::size_t emit_signal_excerpt(const std::filesystem::path& path, std::span<const double> values,
                                Index first_step) {
  auto out = open_for_write(path);
  out << "t,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (first_step + static_cast<Index>(i)) << ',' << format_double(values[i]) << '\n';
  }
  finish(out, path);
  return values.size();
}

std::size_t emit_plot_data(const SpectrumReport& report, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "layer,frequency,magnitude\n";
  std::size_t rows = 0;
  for (std::size_t l = 0; l < report.per_layer.size(); ++l) {
    const auto& curve = report.per_layer[l];
    for (std::size_t k = 0; k < curve.size(); ++k, ++rows) {
      out << (l + 1) << ',' << format_double(report.freq_bins[k]) << ',' << format_double(curve[k]) << '\n';
    }
  }
  finish(out, path);
  return rows;
}

std::size_t emit_plot_data(std::span<const NrmseRow> rows, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "task,model,mean,std\n";
  for (const auto& r : rows) {
    out << r.task << ',' << r.model << ',' << format_double(r.mean) << ',' << format_double(r.std) << '\n';
  }
  finish(out, path);
  return rows.size();
}

std::size_t emit_plot_data(const ExperimentResult& result, std::string_view model,
                           const std::filesystem::path& path) {
  std::vector<NrmseRow> rows;
  if (const auto* best = result.best()) {
    rows.push_back({result.task, std::string(model), best->scores.mean_test, best->scores.std_test});
  }
  return emit_plot_data(std::span<const NrmseRow>(rows), path);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto out = open_for_write(path);
  out << text;
  finish(out, path);
}

}  // namespace deepesn

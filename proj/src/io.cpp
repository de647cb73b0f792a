#include "sbwave/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sbwave/fourier.hpp"

namespace sbwave::io {

namespace {

std::ofstream open_or_throw(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

std::string format_g17(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_profile_csv(const std::string& path, const Grid<double>& grid,
                       const Profile<double>& profile) {
  std::ofstream out = open_or_throw(path);
  out << "x,eps_re,eps_im,eps_hat,n,w,phi\n";
  const Vec<double> x = coordinates(grid);
  for (Index j = 0; j < grid.n_points; ++j) {
    out << format_g17(x[j]) << ',' << format_g17(profile.eps[j].real()) << ','
        << format_g17(profile.eps[j].imag()) << ',' << format_g17(profile.eps_hat[j])
        << ',' << format_g17(profile.n[j]) << ',' << format_g17(profile.w[j]) << ','
        << format_g17(profile.phi[j]) << '\n';
  }
}

void write_state_csv(const std::string& path, const State<double>& state) {
  std::ofstream out = open_or_throw(path);
  out << "x,eps_re,eps_im,eps_hat,n,w,phi\n";
  const Grid<double>& g = state.grid;
  const Vec<double> x = coordinates(g);

  // phi up to a constant: linear ramp for the mean of w plus the periodic
  // antiderivative of the rest
  Fourier<double> fft;
  const double mean_w = state.w.mean();
  CVec<double> spec = fft.fwd(Vec<double>(state.w.array() - mean_w));
  const Vec<double> k = wavenumbers(g);
  for (Index j = 0; j < g.n_points; ++j)
    spec[j] = (k[j] == 0.0) ? std::complex<double>(0, 0)
                            : spec[j] / std::complex<double>(0, k[j]);
  const Vec<double> phi_periodic = fft.inv_real(spec);

  for (Index j = 0; j < g.n_points; ++j) {
    out << format_g17(x[j]) << ',' << format_g17(state.eps[j].real()) << ','
        << format_g17(state.eps[j].imag()) << ',' << format_g17(std::abs(state.eps[j]))
        << ',' << format_g17(state.n[j]) << ',' << format_g17(state.w[j]) << ','
        << format_g17(mean_w * x[j] + phi_periodic[j]) << '\n';
  }
}

void write_region_csv(const std::string& path,
                      const std::vector<RegionRow<double>>& rows) {
  std::ofstream out = open_or_throw(path);
  out << "omega,v,exists,stable,det,p,gamma_star\n";
  for (const auto& r : rows) {
    out << format_g17(r.omega) << ',' << format_g17(r.v) << ',' << (r.exists ? 1 : 0)
        << ',' << (r.stable ? 1 : 0) << ',';
    if (r.has_hessian)
      out << format_g17(r.det) << ',' << r.p_dpp << ',' << format_g17(r.gamma_star);
    else
      out << ",,";
    out << '\n';
  }
}

void write_conservation_csv(const std::string& path, const ConservationLog<double>& log) {
  std::ofstream out = open_or_throw(path);
  out << "t,e,q1,q2\n";
  for (const auto& [t, inv] : log.samples)
    out << format_g17(t) << ',' << format_g17(inv.e) << ',' << format_g17(inv.q1) << ','
        << format_g17(inv.q2) << '\n';
}

void write_spectral_jsonl(const std::string& path,
                          const std::array<SpectralReport<double>, 3>& reports) {
  std::ofstream out = open_or_throw(path);
  for (const auto& r : reports) {
    nlohmann::ordered_json rec;
    rec["kind"] = operator_name(r.kind);
    rec["eigenvalues"] = r.lowest_eigenvalues;
    rec["negative_count"] = r.negative_count;
    rec["kernel_residual"] = r.kernel_residual;
    rec["essential_edge"] = r.essential_edge;
    out << rec.dump() << '\n';
  }
}

nlohmann::json stability_to_json(const StabilityReport<double>& report) {
  nlohmann::ordered_json j;
  j["perturbation_size"] = report.perturbation_size;
  j["max_distance"] = report.max_distance;
  j["t_end"] = report.t_end;
  j["certified_region"] = report.certified_region;
  j["conservation_drift"] = {{"e", report.conservation_drift[0]},
                             {"q1", report.conservation_drift[1]},
                             {"q2", report.conservation_drift[2]}};
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (const auto& s : report.series)
    series.push_back({{"t", s.t}, {"distance", s.distance}, {"s1", s.s1}, {"s2", s.s2}});
  j["series"] = std::move(series);
  return j;
}

void write_stability_json(const std::string& path, const StabilityReport<double>& report) {
  std::ofstream out = open_or_throw(path);
  out << stability_to_json(report).dump(2) << '\n';
}

void write_stability_csv(const std::string& path, const StabilityReport<double>& report) {
  std::ofstream out = open_or_throw(path);
  out << "t,distance,s1,s2\n";
  for (const auto& s : report.series)
    out << format_g17(s.t) << ',' << format_g17(s.distance) << ',' << format_g17(s.s1)
        << ',' << format_g17(s.s2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_or_throw(path);
  out << text;
}

}  // namespace sbwave::io

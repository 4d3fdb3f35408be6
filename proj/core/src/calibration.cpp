#include "speccam/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "speccam/error.hpp"

namespace speccam {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Eigenvalues of a symmetric 3x3, trigonometric closed form.
std::array<double, 3> sym3_eigenvalues(const Mat3& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  if (p1 == 0.0) return {a[0][0], a[1][1], a[2][2]};
  const double d0 = a[0][0] - q, d1 = a[1][1] - q, d2 = a[2][2] - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  const double detb =
      b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
      b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  double r = detb / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double two_pi_3 = 2.0943951023931954923;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * two_pi_3);
  const double e2 = 3.0 * q - e1 - e3;
  return {e1, e2, e3};
}

Mat3 invert3(const Mat3& m) {
  Mat3 adj;
  adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  adj[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  adj[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  adj[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  adj[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  adj[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double det =
      m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
  if (det == 0.0 || !std::isfinite(det))
    throw SingularCalibration("<VVt> is singular");
  Mat3 inv;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inv[i][j] = adj[i][j] / det;
  return inv;
}

}  // namespace

std::vector<std::pair<std::string, ExposureVerdict>> validate_exposure(
    const ChartSamples& samples) {
  std::vector<std::pair<std::string, ExposureVerdict>> out;
  out.reserve(samples.samples.size());
  for (const auto& s : samples.samples) {
    const double mx = s.rgb.max_channel();
    ExposureVerdict v = ExposureVerdict::Ok;
    if (mx >= 255.0)
      v = ExposureVerdict::Overexposed;
    else if (mx < 100.0)
      v = ExposureVerdict::Underexposed;
    out.emplace_back(s.block_id, v);
  }
  return out;
}

TransformationMatrix wiener_tm(const ChartSamples& samples,
                               const ColorChart& chart,
                               const WienerOptions& options) {
  const std::size_t n = samples.samples.size();
  if (n != chart.blocks.size()) {
    std::ostringstream msg;
    msg << n << " samples vs " << chart.blocks.size() << " chart blocks";
    throw ChartMismatch(msg.str());
  }
  if (n < 3) throw ChartMismatch("need at least 3 blocks");

  const WavelengthGrid& grid = chart.blocks.front().reflectance.grid();
  const std::size_t bands = grid.size();

  // cross = <V'Vt> (bands x 3), second = <VVt> (3 x 3), raw second moments.
  std::vector<std::array<double, 3>> cross(bands, {0.0, 0.0, 0.0});
  Mat3 second{};
  for (std::size_t i = 0; i < n; ++i) {
    const Spectrum& refl = chart.blocks[i].reflectance;
    if (!(refl.grid() == grid))
      throw GridMismatch("chart blocks on differing grids");
    const RgbTriple& v = samples.samples[i].rgb;
    const std::array<double, 3> rgb = {v.r, v.g, v.b};
    for (std::size_t b = 0; b < bands; ++b)
      for (int c = 0; c < 3; ++c) cross[b][c] += refl[b] * rgb[c];
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) second[a][c] += rgb[a] * rgb[c];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& row : cross)
    for (double& x : row) x *= inv_n;
  for (auto& row : second)
    for (double& x : row) x *= inv_n;

  const double trace = second[0][0] + second[1][1] + second[2][2];
  const double ridge = options.ridge_scale * trace / 3.0;
  for (int a = 0; a < 3; ++a) second[a][a] += ridge;

  auto eig = sym3_eigenvalues(second);
  const double emax = std::max({eig[0], eig[1], eig[2]});
  const double emin = std::min({eig[0], eig[1], eig[2]});
  if (!(emin > 0.0) || emax / emin > 1e12)
    throw SingularCalibration("<VVt> condition number above 1e12 after ridge");

  const Mat3 inv = invert3(second);
  TransformationMatrix tm(grid);
  for (std::size_t b = 0; b < bands; ++b)
    for (int c = 0; c < 3; ++c)
      tm.rows[b][c] = cross[b][0] * inv[0][c] + cross[b][1] * inv[1][c] +
                      cross[b][2] * inv[2][c];
  return tm;
}

ChartSamples sample_chart(const RgbImage& image, ChartLayout layout,
                          double margin_fraction,
                          const std::string& chart_name) {
  if (layout.rows == 0 || layout.cols == 0)
    throw LayoutTooFine("layout must have at least one row and column");
  if (!(margin_fraction >= 0.0 && margin_fraction < 0.5))
    throw LayoutTooFine("margin fraction must be in [0, 0.5)");

  ChartSamples out;
  out.chart_name = chart_name;
  const double cell_w = static_cast<double>(image.width) / layout.cols;
  const double cell_h = static_cast<double>(image.height) / layout.rows;
  std::size_t idx = 0;
  for (std::size_t row = 0; row < layout.rows; ++row) {
    for (std::size_t col = 0; col < layout.cols; ++col, ++idx) {
      const double x0 = col * cell_w + margin_fraction * cell_w;
      const double x1 = (col + 1) * cell_w - margin_fraction * cell_w;
      const double y0 = row * cell_h + margin_fraction * cell_h;
      const double y1 = (row + 1) * cell_h - margin_fraction * cell_h;
      const std::size_t px0 = static_cast<std::size_t>(std::ceil(x0));
      const std::size_t px1 = static_cast<std::size_t>(std::floor(x1));
      const std::size_t py0 = static_cast<std::size_t>(std::ceil(y0));
      const std::size_t py1 = static_cast<std::size_t>(std::floor(y1));
      if (px1 < px0 + 4 || py1 < py0 + 4)
        throw LayoutTooFine("sampling box below 4x4 px after margin shrink");
      double r = 0, g = 0, b = 0;
      std::size_t count = 0;
      for (std::size_t y = py0; y < py1; ++y) {
        for (std::size_t x = px0; x < px1; ++x) {
          const RgbTriple& p = image.at(x, y);
          r += p.r;
          g += p.g;
          b += p.b;
          ++count;
        }
      }
      std::ostringstream id;
      id << "b" << (idx < 9 ? "0" : "") << (idx + 1);
      out.samples.push_back(
          {id.str(), {r / count, g / count, b / count}});
    }
  }
  return out;
}

namespace {

std::filesystem::path profile_path(const std::filesystem::path& store_dir,
                                   const std::string& device_model) {
  return store_dir / (device_model + ".profile.json");
}

}  // namespace

void save_profile(const DeviceProfile& profile,
                  const std::filesystem::path& store_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(store_dir, ec);

  nlohmann::json j;
  j["device_model"] = profile.device_model;
  j["illuminant"] = profile.illuminant;
  j["chart_name"] = profile.chart_name;
  j["wavelengths"] = profile.tm.grid.bands();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : profile.tm.rows)
    rows.push_back({row[0], row[1], row[2]});
  j["matrix"] = rows;
  j["created_at"] = profile.created_at;

  const fs::path target = profile_path(store_dir, profile.device_model);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
  }
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

DeviceProfile load_profile(const std::string& device_model,
                           const std::filesystem::path& store_dir) {
  const auto path = profile_path(store_dir, device_model);
  std::ifstream in(path);
  if (!in) throw ProfileNotFound("no profile for '" + device_model + "' in " +
                                 store_dir.string());
  nlohmann::json j;
  try {
    in >> j;
    DeviceProfile p;
    p.device_model = j.at("device_model").get<std::string>();
    p.illuminant = j.at("illuminant").get<std::string>();
    p.chart_name = j.at("chart_name").get<std::string>();
    p.created_at = j.at("created_at").get<std::string>();
    WavelengthGrid grid(j.at("wavelengths").get<std::vector<double>>());
    p.tm = TransformationMatrix(grid);
    const auto& rows = j.at("matrix");
    if (rows.size() != grid.size())
      throw ProfileCorrupt("matrix row count differs from wavelength count");
    for (std::size_t b = 0; b < grid.size(); ++b)
      for (int c = 0; c < 3; ++c) p.tm.rows[b][c] = rows[b][c].get<double>();
    for (const auto& row : p.tm.rows)
      for (double v : row)
        if (!std::isfinite(v)) throw ProfileCorrupt("non-finite matrix entry");
    return p;
  } catch (const ProfileCorrupt&) {
    throw;
  } catch (const std::exception& e) {
    throw ProfileCorrupt(path.string() + ": " + e.what());
  }
}

}  // namespace speccam

#include "speccam/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "speccam/error.hpp"

namespace speccam {

namespace {

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw IoError("truncated cube file");
  return static_cast<std::uint32_t>(buf[0]) |
         (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) |
         (static_cast<std::uint32_t>(buf[3]) << 24);
}

void put_f32(std::ostream& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

float get_f32(std::istream& in) {
  const std::uint32_t bits = get_u32(in);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RgbImage read_ppm(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw IoError(path.string() + ": not a P6 ppm");
  auto next_token = [&in, &path]() -> long {
    // skip whitespace and '#' comments
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v;
    if (!(in >> v)) throw IoError(path.string() + ": malformed ppm header");
    return v;
  };
  const long w = next_token(), h = next_token(), maxval = next_token();
  if (w < 1 || h < 1 || maxval != 255)
    throw IoError(path.string() + ": unsupported ppm header");
  in.get();  // single whitespace after maxval
  RgbImage image(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!in) throw IoError(path.string() + ": truncated pixel data");
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    image.pixels[i] = {static_cast<double>(buf[3 * i]),
                       static_cast<double>(buf[3 * i + 1]),
                       static_cast<double>(buf[3 * i + 2])};
  }
  return image;
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
  auto out = open_out(path, true);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<unsigned char> buf(image.pixels.size() * 3);
  auto quantize = [](double v) {
    return static_cast<unsigned char>(
        std::clamp(std::lround(v), 0L, 255L));
  };
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    buf[3 * i] = quantize(image.pixels[i].r);
    buf[3 * i + 1] = quantize(image.pixels[i].g);
    buf[3 * i + 2] = quantize(image.pixels[i].b);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

SpectralCube read_cube(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MSC1", 4) != 0)
    throw IoError(path.string() + ": bad cube magic");
  const std::uint32_t w = get_u32(in);
  const std::uint32_t h = get_u32(in);
  const std::uint32_t bands = get_u32(in);
  if (w == 0 || h == 0 || bands == 0)
    throw IoError(path.string() + ": empty cube dimensions");
  std::vector<double> centers(bands);
  for (auto& c : centers) c = get_f32(in);
  SpectralCube cube(w, h, WavelengthGrid(centers));
  for (double& v : cube.data()) v = get_f32(in);
  if (!in) throw IoError(path.string() + ": truncated cube payload");
  in.peek();
  if (!in.eof()) throw IoError(path.string() + ": trailing bytes after payload");
  return cube;
}

void write_cube(const SpectralCube& cube, const std::filesystem::path& path) {
  auto out = open_out(path, true);
  out.write("MSC1", 4);
  put_u32(out, static_cast<std::uint32_t>(cube.width()));
  put_u32(out, static_cast<std::uint32_t>(cube.height()));
  put_u32(out, static_cast<std::uint32_t>(cube.grid().size()));
  for (double c : cube.grid().bands()) put_f32(out, static_cast<float>(c));
  for (double v : cube.data()) put_f32(out, static_cast<float>(v));
}

ColorChart read_chart_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty chart csv");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "block_id")
    throw IoError(path.string() + ": chart csv header must start with block_id");
  std::vector<double> bands;
  for (std::size_t i = 1; i < header.size(); ++i)
    bands.push_back(std::stod(header[i]));
  WavelengthGrid grid(bands);

  ColorChart chart;
  chart.name = path.stem().string();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw IoError(path.string() + ": chart row width differs from header");
    std::vector<double> values;
    values.reserve(bands.size());
    for (std::size_t i = 1; i < fields.size(); ++i)
      values.push_back(std::stod(fields[i]));
    chart.blocks.push_back({fields[0], Spectrum(grid, std::move(values))});
  }
  if (chart.blocks.empty()) throw IoError(path.string() + ": chart has no blocks");
  return chart;
}

void write_chart_csv(const ColorChart& chart,
                     const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "block_id";
  const WavelengthGrid& grid = chart.blocks.front().reflectance.grid();
  for (double b : grid.bands()) out << "," << b;
  out << "\n";
  for (const auto& block : chart.blocks) {
    out << block.id;
    for (double v : block.reflectance.values()) out << "," << format_double(v);
    out << "\n";
  }
}

SyntheticDataset read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line))
    throw IoError(path.string() + ": empty dataset csv");
  const auto header = split_csv_line(line);
  const WavelengthGrid& grid = WavelengthGrid::default_grid();
  if (header.size() != 5 + grid.size() || header[0] != "id" ||
      header[1] != "r" || header.back() != "bbl_umol_l")
    throw IoError(path.string() + ": unexpected dataset csv header");

  SyntheticDataset ds;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw IoError(path.string() + ": dataset row width differs from header");
    DatasetRecord rec{{std::stod(fields[1]), std::stod(fields[2]),
                       std::stod(fields[3])},
                      Spectrum::constant(0.0),
                      std::stod(fields.back())};
    std::vector<double> values(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
      values[b] = std::stod(fields[4 + b]);
    rec.spectrum = Spectrum(grid, std::move(values));
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

void write_dataset_csv(const SyntheticDataset& dataset,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "id,r,g,b";
  for (double b : WavelengthGrid::default_grid().bands())
    out << ",s" << static_cast<int>(b);
  out << ",bbl_umol_l\n";
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const DatasetRecord& rec = dataset.records[i];
    out << (i + 1) << "," << format_double(rec.rgb.r) << ","
        << format_double(rec.rgb.g) << "," << format_double(rec.rgb.b);
    for (double v : rec.spectrum.values()) out << "," << format_double(v);
    out << "," << format_double(rec.bbl_umol_l) << "\n";
  }
}

std::vector<RoiEntry> read_roi_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty roi csv");
  const auto header = split_csv_line(line);
  if (header.size() != 4 || header[0] != "snapshot_id")
    throw IoError(path.string() + ": roi csv header must be snapshot_id,x,y,side");
  std::vector<RoiEntry> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      std::ostringstream msg;
      msg << path.string() << " row " << row << ": expected 4 fields";
      throw IoError(msg.str());
    }
    RoiEntry entry;
    entry.snapshot_id = fields[0];
    const long x = std::stol(fields[1]);
    const long y = std::stol(fields[2]);
    const long side = std::stol(fields[3]);
    if (x < 0 || y < 0 || side < 1) {
      std::ostringstream msg;
      msg << path.string() << " row " << row << ": invalid roi";
      throw RoiOutOfBounds(msg.str());
    }
    entry.roi = {static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                 static_cast<std::size_t>(side)};
    out.push_back(std::move(entry));
  }
  if (out.empty()) throw EmptyInput(path.string() + ": roi csv has no rows");
  return out;
}

std::string report_json(const AgreementReport& agreement, const RocReport& roc,
                        const std::string& mode, const std::string& model,
                        std::size_t folds, std::uint64_t seed, std::size_t n) {
  nlohmann::json j;
  j["mode"] = mode;
  j["model"] = model;
  j["folds"] = folds;
  j["seed"] = seed;
  j["n"] = n;
  j["agreement"] = {{"r", agreement.r},
                    {"p_value", agreement.p_value},
                    {"md", agreement.md},
                    {"std_md", agreement.std_md},
                    {"loa_upper", agreement.loa_upper},
                    {"loa_lower", agreement.loa_lower}};
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [fpr, tpr] : roc.points) pts.push_back({fpr, tpr});
  j["roc"] = {{"threshold", roc.threshold},
              {"auroc", roc.auroc},
              {"points", std::move(pts)}};
  return j.dump(2);
}

void write_curve_csv(const LearningCurve& curve,
                     const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "mode,fraction,n,r,md,std_md\n";
  auto emit = [&](const char* mode, const std::vector<LearningCurvePoint>& pts) {
    for (const auto& p : pts)
      out << mode << "," << format_double(p.fraction) << "," << p.n << ","
          << format_double(p.r) << "," << format_double(p.md) << ","
          << format_double(p.std_md) << "\n";
  };
  emit("sal", curve.sal);
  emit("rgbl", curve.rgbl);
}

std::string stability_json(const StabilitySummary& summary) {
  nlohmann::json j;
  j["sal"] = {{"std_r", summary.sal_std_r},
              {"std_md", summary.sal_std_md},
              {"std_std_md", summary.sal_std_stdmd}};
  j["rgbl"] = {{"std_r", summary.rgbl_std_r},
               {"std_md", summary.rgbl_std_md},
               {"std_std_md", summary.rgbl_std_stdmd}};
  return j.dump(2);
}

}  // namespace speccam

#include "mapcore/raster.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mapcore/error.hpp"
#include "text_util.hpp"

namespace mapcore {

namespace fs = std::filesystem;
using detail::format_double;
using detail::parse_double;

void ValidRange::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || min < 0.0 || !(max > min)) {
    throw Error(ErrorCode::kConfig, "valid range must satisfy 0 <= min < max");
  }
}

std::string_view to_string(DepthKind kind) {
  return kind == DepthKind::kRange ? "range" : "planar";
}

DepthKind depth_kind_from_string(std::string_view s) {
  if (s == "range") return DepthKind::kRange;
  if (s == "planar") return DepthKind::kPlanar;
  throw Error(ErrorCode::kConfig, "unknown depth kind '" + std::string(s) + "'");
}

DepthMap::DepthMap(int width, int height, std::vector<float> values, ValidRange range,
                   DepthKind kind)
    : width_(width), height_(height), values_(std::move(values)), range_(range), kind_(kind) {
  if (width < 0 || height < 0 ||
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != values_.size()) {
    throw Error(ErrorCode::kDimension, "depth map " + std::to_string(width) + "x" +
                                           std::to_string(height) + " does not hold " +
                                           std::to_string(values_.size()) + " values");
  }
}

DepthMap DepthMap::filled(int width, int height, float fill, ValidRange range, DepthKind kind) {
  return DepthMap(width, height,
                  std::vector<float>(static_cast<std::size_t>(width) * height, fill), range,
                  kind);
}

std::size_t DepthMap::invalid_count() const {
  return static_cast<std::size_t>(std::count_if(
      values_.begin(), values_.end(), [this](float v) { return !range_.contains(v); }));
}

DepthMap DepthMap::with_range(ValidRange range) const {
  DepthMap out = *this;
  out.range_ = range;
  return out;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

double range_per_planar(const PixelCoord& p, const Intrinsics& k) {
  const double xn = (p.x - k.principal_x()) / k.fx;
  const double yn = (p.y - k.principal_y()) / k.fy;
  return std::sqrt(1.0 + xn * xn + yn * yn);
}

namespace {

DepthMap convert_kind(const DepthMap& dm, const Intrinsics& k, DepthKind target) {
  if (dm.kind() == target) return dm;
  if (dm.width() != k.width || dm.height() != k.height) {
    throw Error(ErrorCode::kDimension, "depth map and intrinsics disagree on image size");
  }
  std::vector<float> values = dm.values();
  for (int y = 0; y < dm.height(); ++y) {
    for (int x = 0; x < dm.width(); ++x) {
      if (!dm.valid(x, y)) continue;
      const double factor = range_per_planar({double(x), double(y)}, k);
      float& v = values[static_cast<std::size_t>(y) * dm.width() + x];
      v = static_cast<float>(target == DepthKind::kRange ? v * factor : v / factor);
    }
  }
  return DepthMap(dm.width(), dm.height(), std::move(values), dm.valid_range(), target);
}

// Camera axes expressed in ENU.
struct CameraAxes {
  Point3 right;
  Point3 up;
  Point3 forward;
};

CameraAxes camera_axes(const CameraPose& pose) {
  const double b = deg2rad(pose.bearing);
  const double p = deg2rad(pose.pitch);
  const double sb = std::sin(b), cb = std::cos(b), sp = std::sin(p), cp = std::cos(p);
  return {{cb, -sb, 0.0}, {-sp * sb, -sp * cb, cp}, {cp * sb, cp * cb, sp}};
}

double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

// Reads `count` float32 values stored with the given endianness.
std::vector<float> read_floats(std::istream& in, std::size_t count, bool little_endian,
                               const fs::path& path) {
  std::vector<float> values(count);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) {
    throw Error(ErrorCode::kFormat, path.string() + ": truncated float data");
  }
  const bool host_little = std::endian::native == std::endian::little;
  if (host_little != little_endian) {
    for (float& v : values) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = byteswap32(bits);
      std::memcpy(&v, &bits, 4);
    }
  }
  return values;
}

void write_floats_le(std::ostream& out, const float* data, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t bits;
      std::memcpy(&bits, data + i, 4);
      bits = byteswap32(bits);
      out.write(reinterpret_cast<const char*>(&bits), 4);
    }
  }
}

// Reads one whitespace-delimited PFM header token.
std::string pfm_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

DepthMap load_pfm(const fs::path& path, ValidRange range, DepthKind kind) {
  auto in = open_in(path, std::ios::binary);
  const std::string magic = pfm_token(in);
  if (magic != "Pf") {
    throw Error(ErrorCode::kFormat, path.string() + ": expected grayscale PFM ('Pf'), got '" +
                                        magic + "'");
  }
  const auto w = detail::parse_int(pfm_token(in));
  const auto h = detail::parse_int(pfm_token(in));
  const auto scale = parse_double(pfm_token(in));
  if (!w || !h || !scale || *w < 1 || *h < 1 || *scale == 0.0) {
    throw Error(ErrorCode::kFormat, path.string() + ": malformed PFM header");
  }
  const auto width = static_cast<int>(*w);
  const auto height = static_cast<int>(*h);
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<float> bottom_up = read_floats(in, n, *scale < 0.0, path);
  std::vector<float> values(n);
  for (int row = 0; row < height; ++row) {
    std::copy_n(bottom_up.begin() + static_cast<std::ptrdiff_t>(row) * width, width,
                values.begin() + static_cast<std::ptrdiff_t>(height - 1 - row) * width);
  }
  return DepthMap(width, height, std::move(values), range, kind);
}

fs::path sidecar_for(const fs::path& path) {
  fs::path s = path;
  s.replace_extension(".json");
  return s;
}

DepthMap load_raw(const fs::path& path, ValidRange range) {
  const fs::path side = sidecar_for(path);
  nlohmann::json meta;
  try {
    auto sin = open_in(side);
    meta = nlohmann::json::parse(sin);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, side.string() + ": " + e.what());
  }
  if (!meta.is_object() || !meta.contains("width") || !meta.contains("height") ||
      !meta["width"].is_number_integer() || !meta["height"].is_number_integer()) {
    throw Error(ErrorCode::kFormat, side.string() + ": sidecar needs integer width and height");
  }
  if (meta.contains("unit") && meta["unit"] != "m") {
    throw Error(ErrorCode::kFormat, side.string() + ": unit must be \"m\"");
  }
  DepthKind kind = DepthKind::kRange;
  if (meta.contains("kind")) {
    if (!meta["kind"].is_string()) throw Error(ErrorCode::kFormat, side.string() + ": bad kind");
    try {
      kind = depth_kind_from_string(meta["kind"].get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, side.string() + ": " + e.what());
    }
  }
  const long long w = meta["width"].get<long long>();
  const long long h = meta["height"].get<long long>();
  if (w < 1 || h < 1) throw Error(ErrorCode::kFormat, side.string() + ": empty raster");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const auto bytes = fs::file_size(path);
  if (bytes != n * sizeof(float)) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + std::to_string(bytes) +
                                        " bytes but sidecar declares " + std::to_string(w) +
                                        "x" + std::to_string(h));
  }
  auto in = open_in(path, std::ios::binary);
  return DepthMap(static_cast<int>(w), static_cast<int>(h), read_floats(in, n, true, path),
                  range, kind);
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// --- point clouds ---------------------------------------------------------

PointCloud load_xyz(const fs::path& path) {
  auto in = open_in(path);
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = detail::split_whitespace(body);
    if (fields.size() < 3) {
      throw Error(ErrorCode::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": expected 'X Y Z'");
    }
    Point3 p;
    double* dst[3] = {&p.x, &p.y, &p.z};
    for (int i = 0; i < 3; ++i) {
      const auto v = parse_double(fields[i]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                            ": non-numeric coordinate '" +
                                            std::string(fields[i]) + "'");
      }
      *dst[i] = *v;
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

struct PlyProperty {
  std::string name;
  std::size_t size = 0;  // bytes in binary encodings
  bool is_float = false;
  bool is_signed = false;
};

std::size_t ply_type_size(const std::string& t, bool& is_float, bool& is_signed) {
  is_float = false;
  is_signed = true;
  if (t == "char" || t == "int8") return 1;
  if (t == "uchar" || t == "uint8") { is_signed = false; return 1; }
  if (t == "short" || t == "int16") return 2;
  if (t == "ushort" || t == "uint16") { is_signed = false; return 2; }
  if (t == "int" || t == "int32") return 4;
  if (t == "uint" || t == "uint32") { is_signed = false; return 4; }
  if (t == "float" || t == "float32") { is_float = true; return 4; }
  if (t == "double" || t == "float64") { is_float = true; return 8; }
  return 0;
}

double decode_le(const unsigned char* p, const PlyProperty& prop) {
  std::uint64_t raw = 0;
  for (std::size_t i = 0; i < prop.size; ++i) raw |= std::uint64_t(p[i]) << (8 * i);
  if (prop.is_float) {
    if (prop.size == 4) {
      const auto bits = static_cast<std::uint32_t>(raw);
      float f;
      std::memcpy(&f, &bits, 4);
      return f;
    }
    double d;
    std::memcpy(&d, &raw, 8);
    return d;
  }
  if (prop.is_signed) {
    const unsigned shift = 64 - 8 * static_cast<unsigned>(prop.size);
    return static_cast<double>(static_cast<std::int64_t>(raw << shift) >> shift);
  }
  return static_cast<double>(raw);
}

PointCloud load_ply(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "ply") {
    throw Error(ErrorCode::kFormat, path.string() + ": missing 'ply' magic");
  }
  std::string format;
  std::size_t vertex_count = 0;
  int element_index = -1;
  int vertex_index = -1;
  bool in_vertex = false;
  std::vector<PlyProperty> props;
  while (true) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kFormat, path.string() + ": header has no end_header");
    }
    const auto tok = detail::split_whitespace(detail::trim(line));
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format" && tok.size() >= 2) {
      format = std::string(tok[1]);
    } else if (tok[0] == "element" && tok.size() >= 3) {
      ++element_index;
      in_vertex = tok[1] == "vertex";
      if (in_vertex) {
        vertex_index = element_index;
        const auto n = detail::parse_int(tok[2]);
        if (!n || *n < 0) throw Error(ErrorCode::kFormat, path.string() + ": bad vertex count");
        vertex_count = static_cast<std::size_t>(*n);
      }
    } else if (tok[0] == "property" && in_vertex) {
      if (tok.size() < 3 || tok[1] == "list") {
        throw Error(ErrorCode::kFormat, path.string() + ": unsupported vertex property");
      }
      PlyProperty prop;
      prop.name = std::string(tok[2]);
      prop.size = ply_type_size(std::string(tok[1]), prop.is_float, prop.is_signed);
      if (prop.size == 0) {
        throw Error(ErrorCode::kFormat,
                    path.string() + ": unknown PLY type '" + std::string(tok[1]) + "'");
      }
      props.push_back(prop);
    }
  }
  if (vertex_index != 0) {
    throw Error(ErrorCode::kFormat, path.string() + ": vertex must be the first PLY element");
  }
  int ix = -1, iy = -1, iz = -1;
  for (int i = 0; i < static_cast<int>(props.size()); ++i) {
    if (props[i].name == "x") ix = i;
    if (props[i].name == "y") iy = i;
    if (props[i].name == "z") iz = i;
  }
  if (ix < 0 || iy < 0 || iz < 0) {
    throw Error(ErrorCode::kFormat, path.string() + ": vertex lacks x, y, z");
  }

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  if (format == "ascii") {
    for (std::size_t i = 0; i < vertex_count; ++i) {
      if (!std::getline(in, line)) throw Error(ErrorCode::kFormat, path.string() + ": truncated");
      const auto fields = detail::split_whitespace(detail::trim(line));
      if (fields.size() < props.size()) {
        throw Error(ErrorCode::kFormat, path.string() + ": short vertex row");
      }
      const auto x = parse_double(fields[ix]);
      const auto y = parse_double(fields[iy]);
      const auto z = parse_double(fields[iz]);
      if (!x || !y || !z) throw Error(ErrorCode::kFormat, path.string() + ": non-numeric vertex");
      cloud.points.push_back({*x, *y, *z});
    }
  } else if (format == "binary_little_endian") {
    std::size_t stride = 0;
    for (const auto& p : props) stride += p.size;
    std::vector<unsigned char> row(stride);
    for (std::size_t i = 0; i < vertex_count; ++i) {
      in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(stride));
      if (static_cast<std::size_t>(in.gcount()) != stride) {
        throw Error(ErrorCode::kFormat, path.string() + ": truncated vertex data");
      }
      double v[3];
      const int idx[3] = {ix, iy, iz};
      for (int c = 0; c < 3; ++c) {
        std::size_t offset = 0;
        for (int j = 0; j < idx[c]; ++j) offset += props[j].size;
        v[c] = decode_le(row.data() + offset, props[idx[c]]);
      }
      cloud.points.push_back({v[0], v[1], v[2]});
    }
  } else {
    throw Error(ErrorCode::kFormat, path.string() + ": unsupported PLY format '" + format + "'");
  }
  for (const auto& p : cloud.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::kFormat, path.string() + ": non-finite vertex");
    }
  }
  return cloud;
}

// --- metadata CSV ----------------------------------------------------------

constexpr std::string_view kMetaHeader =
    "image_id,lat,lon,bearing_deg,pitch_deg,fx_px,fy_px,width,height,timestamp,source";

}  // namespace

DepthMap to_range(const DepthMap& dm, const Intrinsics& k) {
  return convert_kind(dm, k, DepthKind::kRange);
}

DepthMap to_planar(const DepthMap& dm, const Intrinsics& k) {
  return convert_kind(dm, k, DepthKind::kPlanar);
}

Point3 enu_to_camera(const Point3& enu, const CameraPose& pose) {
  const CameraAxes a = camera_axes(pose);
  return {dot(enu, a.right), -dot(enu, a.up), dot(enu, a.forward)};
}

Point3 camera_to_enu(const Point3& cam, const CameraPose& pose) {
  const CameraAxes a = camera_axes(pose);
  return {cam.x * a.right.x - cam.y * a.up.x + cam.z * a.forward.x,
          cam.x * a.right.y - cam.y * a.up.y + cam.z * a.forward.y,
          cam.x * a.right.z - cam.y * a.up.z + cam.z * a.forward.z};
}

PointCloud enu_cloud_to_camera(const std::vector<Point3>& enu, const CameraPose& pose) {
  PointCloud out;
  out.points.reserve(enu.size());
  for (const auto& p : enu) out.points.push_back(enu_to_camera(p, pose));
  return out;
}

DepthFormat depth_format_from_string(std::string_view s) {
  if (s == "pfm") return DepthFormat::kPfm;
  if (s == "raw") return DepthFormat::kRaw;
  throw Error(ErrorCode::kConfig, "unknown depth format '" + std::string(s) + "'");
}

std::string_view extension_for(DepthFormat format) {
  return format == DepthFormat::kPfm ? ".pfm" : ".f32";
}

DepthMap load_depth(const fs::path& path, ValidRange range, DepthKind pfm_kind) {
  range.validate();
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no such depth file: " + path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".pfm") return load_pfm(path, range, pfm_kind);
  if (ext == ".f32" || ext == ".raw" || ext == ".bin") return load_raw(path, range);
  throw Error(ErrorCode::kFormat, path.string() + ": unsupported depth extension '" + ext + "'");
}

void save_depth_pfm(const DepthMap& dm, const fs::path& path) {
  auto out = open_out(path, std::ios::binary);
  out << "Pf\n" << dm.width() << ' ' << dm.height() << "\n-1.0\n";
  for (int row = dm.height() - 1; row >= 0; --row) {
    write_floats_le(out, dm.values().data() + static_cast<std::size_t>(row) * dm.width(),
                    static_cast<std::size_t>(dm.width()));
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

void save_depth_raw(const DepthMap& dm, const fs::path& path) {
  {
    auto out = open_out(path, std::ios::binary);
    write_floats_le(out, dm.values().data(), dm.size());
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
  }
  nlohmann::ordered_json meta;
  meta["width"] = dm.width();
  meta["height"] = dm.height();
  meta["unit"] = "m";
  meta["kind"] = std::string(to_string(dm.kind()));
  auto side = open_out(sidecar_for(path));
  side << meta.dump(2) << '\n';
}

void save_depth(const DepthMap& dm, const fs::path& path, DepthFormat format) {
  if (format == DepthFormat::kPfm) {
    save_depth_pfm(dm, path);
  } else {
    save_depth_raw(dm, path);
  }
}

PointCloud load_cloud(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no such cloud file: " + path.string());
  if (lower_extension(path) == ".ply") return load_ply(path);
  return load_xyz(path);
}

void save_cloud_xyz(const PointCloud& cloud, const fs::path& path) {
  auto out = open_out(path);
  for (const auto& p : cloud.points) {
    out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

void save_cloud_ply(const PointCloud& cloud, const fs::path& path) {
  auto out = open_out(path, std::ios::binary);
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& p : cloud.points) {
    for (double v : {p.x, p.y, p.z}) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      unsigned char bytes[8];
      for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
      out.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::vector<RecordingMeta> load_meta(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kFormat, path.string() + ": empty file");
  const auto header = detail::split(detail::trim(line), ',');
  const auto expected = detail::split(kMetaHeader, ',');
  if (header.size() != expected.size() ||
      !std::equal(header.begin(), header.end(), expected.begin(),
                  [](std::string_view a, std::string_view b) { return detail::trim(a) == b; })) {
    throw Error(ErrorCode::kFormat, path.string() + ": header must be '" +
                                        std::string(kMetaHeader) + "'");
  }
  std::vector<RecordingMeta> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() != expected.size()) {
      throw Error(ErrorCode::kFormat, where + ": expected " + std::to_string(expected.size()) +
                                          " columns, got " + std::to_string(f.size()));
    }
    auto num = [&](std::size_t i) {
      const auto v = parse_double(f[i]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::kFormat, where + ": column '" + std::string(expected[i]) +
                                            "' is not a number");
      }
      return *v;
    };
    auto integer = [&](std::size_t i) {
      const auto v = detail::parse_int(f[i]);
      if (!v) {
        throw Error(ErrorCode::kFormat, where + ": column '" + std::string(expected[i]) +
                                            "' is not an integer");
      }
      return static_cast<int>(*v);
    };
    RecordingMeta m;
    m.image_id = std::string(detail::trim(f[0]));
    if (m.image_id.empty()) throw Error(ErrorCode::kFormat, where + ": empty image_id");
    m.pose = CameraPose{num(1), num(2), num(3), num(4)};
    m.intrinsics.fx = num(5);
    m.intrinsics.fy = num(6);
    m.intrinsics.width = integer(7);
    m.intrinsics.height = integer(8);
    const auto ts = detail::trim(f[9]);
    if (!ts.empty()) m.timestamp = std::string(ts);
    m.source = std::string(detail::trim(f[10]));
    try {
      m.pose = m.pose.normalized();
      m.intrinsics.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, where + ": " + e.what());
    }
    rows.push_back(std::move(m));
  }
  return rows;
}

void save_meta(const std::vector<RecordingMeta>& rows, const fs::path& path) {
  auto out = open_out(path);
  out << kMetaHeader << '\n';
  for (const auto& m : rows) {
    out << m.image_id << ',' << format_double(m.pose.lat) << ',' << format_double(m.pose.lon)
        << ',' << format_double(m.pose.bearing) << ',' << format_double(m.pose.pitch) << ','
        << format_double(m.intrinsics.fx) << ',' << format_double(m.intrinsics.fy) << ','
        << m.intrinsics.width << ',' << m.intrinsics.height << ',' << m.timestamp.value_or("")
        << ',' << m.source << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace mapcore

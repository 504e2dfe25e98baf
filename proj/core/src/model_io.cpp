#include "drfi/model_io.hpp"

#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "drfi/error.hpp"

namespace drfi {

void write_model(std::ostream& out, const DrfiModel& model) {
  out.write(kModelMagic.data(), static_cast<std::streamsize>(kModelMagic.size()));
  model.forest.write(out);
  binary::put_u32(out, static_cast<std::uint32_t>(model.fusion.size()));
  for (const double w : model.fusion) binary::put_f64(out, w);
}

DrfiModel read_model(std::istream& in) {
  std::string magic(kModelMagic.size(), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != kModelMagic) throw DataError("not a DRFI1 model file (bad magic header)");
  DrfiModel model;
  model.forest = ForestModel::read(in);
  const std::size_t count = binary::get_u32(in, "fusion weight count");
  if (count > 4096) throw DataError("implausible fusion weight count " + std::to_string(count));
  model.fusion.resize(count);
  for (auto& w : model.fusion) w = binary::get_f64(in, "fusion weight");
  return model;
}

void save_model(const std::filesystem::path& path, const DrfiModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_model(out, model);
  if (!out) throw DataError("failed writing " + path.string());
}

DrfiModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  try {
    return read_model(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace drfi

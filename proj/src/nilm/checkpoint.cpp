#include "loadmask/nilm/checkpoint.hpp"

#include <json.hpp>

#include "loadmask/core/error.hpp"
#include "loadmask/core/text.hpp"

namespace loadmask::nilm {
namespace {
constexpr const char* kFormat = "loadmask.seq2point";
}

void save_model(const std::filesystem::path& path, const Seq2PointModel& model) {
  const auto& s = model.net.spec();
  const auto p = model.net.params();
  const nlohmann::json j = {{"format", kFormat},
                            {"version", Seq2PointModel::kFormatVersion},
                            {"appliance", model.appliance},
                            {"spec",
                             {{"sequence_length", s.sequence_length},
                              {"conv1_channels", s.conv1_channels},
                              {"conv2_channels", s.conv2_channels},
                              {"kernel", s.kernel},
                              {"padding", s.padding}}},
                            {"input_scale", model.input_scale},
                            {"output_scale", model.output_scale},
                            {"threshold", model.threshold},
                            {"seed", model.seed},
                            {"iterations", model.iterations},
                            {"params", std::vector<double>(p.begin(), p.end())}};
  text::write_file_atomic(path, j.dump(1) + "\n");
}

Seq2PointModel load_model(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(text::read_file(path));
    if (j.at("format").get<std::string>() != kFormat)
      throw ValidationError("NILM checkpoint " + path.string() + ": not a seq2point model");
    if (j.at("version").get<int>() != Seq2PointModel::kFormatVersion)
      throw ValidationError("NILM checkpoint " + path.string() + ": unsupported version");
    const auto& js = j.at("spec");
    Seq2PointSpec spec{js.at("sequence_length").get<std::size_t>(), js.at("conv1_channels").get<std::size_t>(),
                       js.at("conv2_channels").get<std::size_t>(), js.at("kernel").get<std::size_t>(),
                       js.at("padding").get<std::size_t>()};
    Seq2PointModel m{j.at("appliance").get<std::string>(), Seq2PointNet(spec)};
    m.net.set_params(j.at("params").get<std::vector<double>>());
    m.input_scale = j.at("input_scale").get<double>();
    m.output_scale = j.at("output_scale").get<double>();
    m.threshold = j.at("threshold").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.iterations = j.at("iterations").get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("NILM checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace loadmask::nilm

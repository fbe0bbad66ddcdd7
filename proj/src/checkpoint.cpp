#include "nnql/checkpoint.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "nnql/fnv.hpp"

namespace nnql {

namespace {

constexpr std::string_view kMagic = "nnql-checkpoint";

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return s;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& cp) {
  const QTable& q = cp.table;
  const HNet& net = q.net();
  nlohmann::json j;
  j["format_version"] = kCheckpointVersion;
  j["h"] = net.h();
  j["kernel"] = std::string(kernel_name(cp.kernel));
  j["bounds"] = {{"lo", net.bounds().lo}, {"hi", net.bounds().hi}};
  j["centers"] = net.centers();
  j["actions"] = q.actions();
  j["values"] = std::vector<double>(q.values().begin(), q.values().end());
  j["steps"] = cp.steps;
  j["iterations"] = cp.iterations;
  const std::string body = j.dump();
  std::ostringstream out;
  out << kMagic << ' ' << kCheckpointVersion << '\n' << body << '\n'
      << "fnv1a64 " << hex64(fnv1a64(body)) << '\n';
  return out.str();
}

Checkpoint parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string header, body, footer;
  if (!std::getline(in, header) || !std::getline(in, body) || !std::getline(in, footer))
    throw CheckpointError("checkpoint is truncated");
  std::istringstream hs(header);
  std::string magic;
  int version = 0;
  if (!(hs >> magic >> version) || magic != kMagic) throw CheckpointError("not a checkpoint file");
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported");
  if (footer != "fnv1a64 " + hex64(fnv1a64(body)))
    throw CheckpointError("checkpoint checksum mismatch");

  try {
    const auto j = nlohmann::json::parse(body);
    if (j.at("format_version").get<int>() != kCheckpointVersion)
      throw CheckpointError("checkpoint body version mismatch");
    Box bounds{j.at("bounds").at("lo").get<std::vector<double>>(),
               j.at("bounds").at("hi").get<std::vector<double>>()};
    auto net = std::make_shared<const HNet>(std::move(bounds), j.at("h").get<double>(),
                                            j.at("centers").get<std::vector<Point>>());
    QTable table(net, j.at("actions").get<std::vector<std::string>>());
    const auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != table.values().size())
      throw CheckpointError("checkpoint value array does not match the table shape");
    std::copy(values.begin(), values.end(), table.values().begin());
    return Checkpoint{std::move(table), parse_kernel(j.at("kernel").get<std::string>()),
                      j.at("steps").get<std::uint64_t>(), j.at("iterations").get<std::uint64_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("invalid checkpoint contents: ") + e.what());
  }
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  out << serialize_checkpoint(checkpoint);
  if (!out) throw CheckpointError("failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

QTable checkpoint_roundtrip(const QTable& table, const std::filesystem::path& path,
                            KernelKind kernel) {
  write_checkpoint(path, Checkpoint{table, kernel, 0, 0});
  return read_checkpoint(path).table;
}

}  // namespace nnql

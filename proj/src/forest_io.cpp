#include "rfdm/forest_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "rfdm/error.hpp"

namespace rfdm::io {

static_assert(std::endian::native == std::endian::little,
              "the forest container is written in host order and assumes little-endian");

namespace {

constexpr char kMagic[8] = {'R', 'F', 'D', 'M', 'F', 'R', 'S', 'T'};

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  template <class T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <class T>
  void put_array(const std::vector<T>& v) {
    put<std::uint64_t>(v.size());
    out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
  }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::ifstream& in, const std::filesystem::path& path) : in_(in), path_(path) {}
  template <class T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw DataError(path_.string() + ": truncated forest file");
    return v;
  }
  template <class T>
  std::vector<T> get_array(std::uint64_t limit) {
    const auto n = get<std::uint64_t>();
    if (n > limit) throw DataError(path_.string() + ": corrupt array length");
    std::vector<T> v(n);
    in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!in_) throw DataError(path_.string() + ": truncated forest file");
    return v;
  }

 private:
  std::ifstream& in_;
  const std::filesystem::path& path_;
};

}  // namespace

void save_forest(const Forest& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kForestFormatVersion);

  w.put<std::uint64_t>(f.params.n_trees);
  w.put<std::uint64_t>(f.params.mtry);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(f.params.task));
  w.put<std::uint64_t>(f.params.max_depth);
  w.put<std::uint64_t>(f.params.min_node_size);
  w.put<std::uint64_t>(f.params.seed);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(f.params.gain_variant));

  w.put<std::uint64_t>(f.n_subjects);
  w.put<std::uint64_t>(f.n_features);
  for (const auto& name : f.feature_names) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }

  w.put<std::uint64_t>(f.trees.size());
  for (const Tree& t : f.trees) {
    w.put<std::uint64_t>(t.nodes.size());
    for (const TreeNode& n : t.nodes) {
      w.put(n.feature);
      w.put(n.split_point);
      w.put(n.gain);
      w.put(n.left);
      w.put(n.right);
      w.put(n.begin);
      w.put(n.end);
      w.put(n.depth);
      w.put(n.candidate_begin);
      w.put(n.candidate_count);
    }
    w.put_array(t.samples);
    w.put_array(t.candidates);
    out.write(reinterpret_cast<const char*>(t.in_bag_count.data()),
              static_cast<std::streamsize>(f.n_subjects * sizeof(std::uint16_t)));
    out.write(reinterpret_cast<const char*>(t.terminal.data()),
              static_cast<std::streamsize>(f.n_subjects * sizeof(std::int32_t)));
  }
  if (!out) throw Error("failed writing " + path.string());
}

Forest load_forest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw DataError(path.string() + ": not a forest file");
  }
  Reader r(in, path);
  const auto version = r.get<std::uint32_t>();
  if (version != kForestFormatVersion) {
    throw DataError(path.string() + ": unsupported forest format version " + std::to_string(version));
  }

  Forest f;
  f.params.n_trees = r.get<std::uint64_t>();
  f.params.mtry = r.get<std::uint64_t>();
  const auto task = r.get<std::uint8_t>();
  f.params.max_depth = r.get<std::uint64_t>();
  f.params.min_node_size = r.get<std::uint64_t>();
  f.params.seed = r.get<std::uint64_t>();
  const auto variant = r.get<std::uint8_t>();
  if (task > 1 || variant > 1) throw DataError(path.string() + ": corrupt parameters");
  f.params.task = static_cast<TaskKind>(task);
  f.params.gain_variant = static_cast<GainVariant>(variant);

  f.n_subjects = r.get<std::uint64_t>();
  f.n_features = r.get<std::uint64_t>();
  if (f.n_subjects > 65535 || f.n_features > (1u << 28)) throw DataError(path.string() + ": corrupt header");
  for (std::size_t c = 0; c < f.n_features; ++c) {
    const auto len = r.get<std::uint32_t>();
    if (len > 4096) throw DataError(path.string() + ": corrupt feature name");
    std::string name(len, '\0');
    in.read(name.data(), len);
    if (!in) throw DataError(path.string() + ": truncated forest file");
    f.feature_names.push_back(std::move(name));
  }

  const auto n_trees = r.get<std::uint64_t>();
  if (n_trees != f.params.n_trees) throw DataError(path.string() + ": tree count mismatch");
  f.trees.resize(n_trees);
  for (Tree& t : f.trees) {
    const auto n_nodes = r.get<std::uint64_t>();
    if (n_nodes > 2 * f.n_subjects + 1) throw DataError(path.string() + ": corrupt node count");
    t.nodes.resize(n_nodes);
    for (TreeNode& n : t.nodes) {
      n.feature = r.get<std::int32_t>();
      n.split_point = r.get<double>();
      n.gain = r.get<double>();
      n.left = r.get<std::int32_t>();
      n.right = r.get<std::int32_t>();
      n.begin = r.get<std::uint32_t>();
      n.end = r.get<std::uint32_t>();
      n.depth = r.get<std::uint32_t>();
      n.candidate_begin = r.get<std::uint32_t>();
      n.candidate_count = r.get<std::uint32_t>();
      if (!n.is_leaf() && (n.left < 0 || n.right < 0 || static_cast<std::uint64_t>(n.left) >= n_nodes ||
                           static_cast<std::uint64_t>(n.right) >= n_nodes)) {
        throw DataError(path.string() + ": corrupt child index");
      }
    }
    t.samples = r.get_array<std::uint32_t>(f.n_subjects);
    t.candidates = r.get_array<std::uint32_t>(n_nodes * f.n_features);
    t.in_bag_count.resize(f.n_subjects);
    t.terminal.resize(f.n_subjects);
    in.read(reinterpret_cast<char*>(t.in_bag_count.data()),
            static_cast<std::streamsize>(f.n_subjects * sizeof(std::uint16_t)));
    in.read(reinterpret_cast<char*>(t.terminal.data()),
            static_cast<std::streamsize>(f.n_subjects * sizeof(std::int32_t)));
    if (!in) throw DataError(path.string() + ": truncated forest file");
  }
  return f;
}

}  // namespace rfdm::io

#include "forgetlab/data/cifar.hpp"

#include <algorithm>
#include <fstream>

#include "forgetlab/error.hpp"

namespace forgetlab::data {

namespace {

constexpr std::size_t kPixels = 3 * 32 * 32;

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void check_record_size(std::size_t total, std::size_t record, const std::string& path) {
  if (total == 0 || total % record != 0) {
    std::size_t offset = (total / record) * record;
    throw FormatError("'" + path + "': size " + std::to_string(total) + " is not a multiple of the " +
                      std::to_string(record) + "-byte record length (trailing bytes start at offset " +
                      std::to_string(offset) + ")");
  }
}

}  // namespace

Dataset load_cifar10(const std::string& path, const std::string& split) {
  const std::size_t record = 1 + kPixels;
  auto bytes = read_file(path);
  check_record_size(bytes.size(), record, path);
  std::size_t n = bytes.size() / record;

  Dataset out;
  out.inputs = Tensor({n, 3, 32, 32});
  out.labels.hard.resize(n);
  out.class_names = cifar10_class_names();
  out.split = split;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec = bytes.data() + i * record;
    int label = rec[0];
    if (label > 9) throw FormatError("'" + path + "': label byte " + std::to_string(label) + " out of range at record " + std::to_string(i));
    out.labels.hard[i] = label;
    double* dst = out.inputs.data() + i * kPixels;
    for (std::size_t k = 0; k < kPixels; ++k) dst[k] = static_cast<double>(rec[1 + k]) / 255.0;
  }
  return out;
}

Cifar100Data load_cifar100(const std::string& path, const std::string& split) {
  const std::size_t record = 2 + kPixels;
  auto bytes = read_file(path);
  check_record_size(bytes.size(), record, path);
  std::size_t n = bytes.size() / record;

  Cifar100Data out;
  out.inputs = Tensor({n, 3, 32, 32});
  out.coarse.resize(n);
  out.fine.resize(n);
  out.split = split;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec = bytes.data() + i * record;
    if (rec[0] > 19) throw FormatError("'" + path + "': coarse label out of range at record " + std::to_string(i));
    out.coarse[i] = rec[0];
    out.fine[i] = rec[1];
    double* dst = out.inputs.data() + i * kPixels;
    for (std::size_t k = 0; k < kPixels; ++k) dst[k] = static_cast<double>(rec[2 + k]) / 255.0;
  }
  return out;
}

const std::vector<std::string>& cifar10_class_names() {
  static const std::vector<std::string> names = {"airplane", "automobile", "bird",  "cat",  "deer",
                                                 "dog",      "frog",       "horse", "ship", "truck"};
  return names;
}

const std::vector<std::string>& cifar100_fine_names() {
  static const std::vector<std::string> names = {
      "apple",      "aquarium_fish", "baby",       "bear",       "beaver",     "bed",        "bee",
      "beetle",     "bicycle",       "bottle",     "bowl",       "boy",        "bridge",     "bus",
      "butterfly",  "camel",         "can",        "castle",     "caterpillar", "cattle",    "chair",
      "chimpanzee", "clock",         "cloud",      "cockroach",  "couch",      "crab",       "crocodile",
      "cup",        "dinosaur",      "dolphin",    "elephant",   "flatfish",   "forest",     "fox",
      "girl",       "hamster",       "house",      "kangaroo",   "keyboard",   "lamp",       "lawn_mower",
      "leopard",    "lion",          "lizard",     "lobster",    "man",        "maple_tree", "motorcycle",
      "mountain",   "mouse",         "mushroom",   "oak_tree",   "orange",     "orchid",     "otter",
      "palm_tree",  "pear",          "pickup_truck", "pine_tree", "plain",     "plate",      "poppy",
      "porcupine",  "possum",        "rabbit",     "raccoon",    "ray",        "road",       "rocket",
      "rose",       "sea",           "seal",       "shark",      "shrew",      "skunk",      "skyscraper",
      "snail",      "snake",         "spider",     "squirrel",   "streetcar",  "sunflower",  "sweet_pepper",
      "table",      "tank",          "telephone",  "television", "tiger",      "tractor",    "train",
      "trout",      "tulip",         "turtle",     "wardrobe",   "whale",      "willow_tree", "wolf",
      "woman",      "worm"};
  return names;
}

const std::vector<std::string>& cifar100_coarse_names() {
  static const std::vector<std::string> names = {"aquatic_mammals",
                                                 "fish",
                                                 "flowers",
                                                 "food_containers",
                                                 "fruit_and_vegetables",
                                                 "household_electrical_devices",
                                                 "household_furniture",
                                                 "insects",
                                                 "large_carnivores",
                                                 "large_man-made_outdoor_things",
                                                 "large_natural_outdoor_scenes",
                                                 "large_omnivores_and_herbivores",
                                                 "medium_mammals",
                                                 "non-insect_invertebrates",
                                                 "people",
                                                 "reptiles",
                                                 "small_mammals",
                                                 "trees",
                                                 "vehicles_1",
                                                 "vehicles_2"};
  return names;
}

namespace {
int index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError(std::string("unknown ") + what + " class '" + name + "'");
  return static_cast<int>(it - names.begin());
}
}  // namespace

int cifar10_class_index(const std::string& name) { return index_of(cifar10_class_names(), name, "CIFAR-10"); }
int cifar100_fine_index(const std::string& name) { return index_of(cifar100_fine_names(), name, "CIFAR-100 fine"); }
int cifar100_coarse_index(const std::string& name) {
  return index_of(cifar100_coarse_names(), name, "CIFAR-100 coarse");
}

}  // namespace forgetlab::data
